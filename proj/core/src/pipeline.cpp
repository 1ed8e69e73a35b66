#include "evtrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

namespace evtrack {

LatencySummary summarize_latency(std::span<const WindowStat> stats) {
  LatencySummary s;
  if (stats.empty()) return s;
  std::vector<double> v;
  v.reserve(stats.size());
  for (const WindowStat& w : stats) v.push_back(w.latency_ms);
  std::sort(v.begin(), v.end());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
  };
  s.p50_ms = rank(0.50);
  s.p95_ms = rank(0.95);
  s.max_ms = v.back();
  return s;
}

PipelineResult run_pipeline(std::span<const Event> events, const RunConfig& config,
                            const PipelineOptions& options) {
  config.validate();
  PipelineResult result;
  Tracker tracker(config.tracker_config());

  BoundedQueue<EventWindow> queue(options.queue_capacity);
  std::exception_ptr producer_error;
  std::thread producer([&] {
    try {
      for (const EventWindow& w :
           window_events(events, config.t_a_us, config.step_us, 0, options.cover_until_us)) {
        queue.push(w);
      }
    } catch (...) {
      producer_error = std::current_exception();
    }
    queue.close();
  });

  std::exception_ptr consumer_error;
  try {
    while (std::optional<EventWindow> w = queue.pop()) {
      const auto start = std::chrono::steady_clock::now();
      StepResult step = tracker.step(*w);
      const auto stop = std::chrono::steady_clock::now();
      result.stats.push_back(
          {w->t_end_us, w->events.size(),
           std::chrono::duration<double, std::milli>(stop - start).count()});
      const std::vector<TrackRow> rows = track_rows(step);
      result.rows.insert(result.rows.end(), rows.begin(), rows.end());
      if (options.keep_steps) result.steps.push_back(std::move(step));
    }
  } catch (...) {
    consumer_error = std::current_exception();
    queue.close();
  }
  producer.join();
  if (consumer_error) std::rethrow_exception(consumer_error);
  if (producer_error) std::rethrow_exception(producer_error);
  result.final_state = tracker.state();
  return result;
}

}  // namespace evtrack
