#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evtrack {

enum class Polarity : std::uint8_t { Negative = 0, Positive = 1 };

/// One brightness change reported by the sensor.
struct Event {
  std::int64_t t_us = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity polarity = Polarity::Positive;

  friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
  std::int32_t width_px = 640;
  std::int32_t height_px = 480;

  void validate() const;
  bool contains(std::int64_t x, std::int64_t y) const noexcept {
    return x >= 0 && y >= 0 && x < width_px && y < height_px;
  }
  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

/// Detection cadence of 24 Hz.
inline constexpr std::int64_t kDefaultStepUs = 41667;
inline constexpr std::int64_t kDefaultAccumulationUs = 100000;

/// Events in the half-open interval (t_end_us - t_a_us, t_end_us]. The span
/// views the stream the window was cut from and must not outlive it.
struct EventWindow {
  std::int64_t t_end_us = 0;
  std::int64_t t_a_us = 0;
  std::span<const Event> events;
};

/// Reads the `t_us,x,y,p` CSV format. The whole stream is rejected on the
/// first violation.
std::vector<Event> parse_event_stream(std::string_view text,
                                      const SensorGeometry& geometry = {});
std::vector<Event> parse_event_stream(std::istream& in,
                                      const SensorGeometry& geometry = {});
std::vector<Event> read_event_file(const std::string& path,
                                   const SensorGeometry& geometry = {});

std::string serialize_event_stream(std::span<const Event> events);
void write_event_stream(std::ostream& out, std::span<const Event> events);

/// Cuts the stream into windows closing at t_start + k * step (k = 1, 2, ...).
/// Without `cover_until_us`, windows continue while the next one would still
/// contain the final event, so every event lands in all of its windows. With
/// it, windows stop at the first close time >= max(cover_until_us, last event).
std::vector<EventWindow> window_events(std::span<const Event> stream,
                                       std::int64_t t_a_us,
                                       std::int64_t step_us,
                                       std::int64_t t_start_us = 0,
                                       std::optional<std::int64_t> cover_until_us = {});

struct PolaritySplit {
  std::vector<Event> positives;
  std::vector<Event> negatives;
  std::vector<Event> all;
};

PolaritySplit split_by_polarity(const EventWindow& window);

}  // namespace evtrack
