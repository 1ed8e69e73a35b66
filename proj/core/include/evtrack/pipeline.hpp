#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "evtrack/event.hpp"
#include "evtrack/io.hpp"
#include "evtrack/run_config.hpp"
#include "evtrack/tracker.hpp"

namespace evtrack {

/// Fixed-capacity FIFO between pipeline stages. push() blocks while full;
/// pop() blocks while empty and returns nullopt once closed and drained.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  void push(T value) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) return;
    items_.push_back(std::move(value));
    not_empty_.notify_one();
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    T value = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return value;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
  bool closed_ = false;
  std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
};

struct WindowStat {
  std::int64_t t_us = 0;
  std::size_t n_events = 0;
  double latency_ms = 0.0;
};

struct LatencySummary {
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

/// Nearest-rank percentiles over the per-window latencies.
LatencySummary summarize_latency(std::span<const WindowStat> stats);

struct PipelineOptions {
  /// Keep windows coming until this time even after the last event.
  std::optional<std::int64_t> cover_until_us;
  std::size_t queue_capacity = 8;
  /// Keep every StepResult (cluster summaries included).
  bool keep_steps = false;
};

struct PipelineResult {
  std::vector<TrackRow> rows;
  std::vector<StepResult> steps;
  std::vector<WindowStat> stats;
  TrackerState final_state;
};

/// Windowing runs on a producer thread; tracking consumes windows strictly in
/// close-time order.
PipelineResult run_pipeline(std::span<const Event> events, const RunConfig& config,
                            const PipelineOptions& options = {});

}  // namespace evtrack
