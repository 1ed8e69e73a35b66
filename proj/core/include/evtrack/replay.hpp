#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evtrack/event.hpp"
#include "evtrack/io.hpp"
#include "evtrack/run_config.hpp"

namespace evtrack {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kBlue{0, 0, 255};
inline constexpr Rgb kRed{255, 0, 0};

struct Image {
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::vector<Rgb> pixels;  // row-major

  Image(std::int32_t w, std::int32_t h, Rgb fill);
  Rgb at(std::int32_t x, std::int32_t y) const;
  /// Ignores out-of-bounds writes.
  void set(std::int32_t x, std::int32_t y, Rgb c);
};

/// White background, positive events black, negative events blue. Each track
/// row gets a red square outline of half-size
/// box_half_px around its centroid and its id in 3x5 digits above the box.
Image render_frame(const EventWindow& window, std::span<const TrackRow> detections,
                   const SensorGeometry& geometry, double box_half_px);

/// Binary P6.
std::string encode_ppm(const Image& image);

/// Writes frame_NNNNNN.ppm (1-based) for every window of the event stream,
/// annotated with the track rows sharing its close time. Returns the frame
/// count.
std::size_t replay(std::span<const Event> events, std::span<const TrackRow> tracks,
                   const RunConfig& config, const std::string& out_dir);

}  // namespace evtrack
