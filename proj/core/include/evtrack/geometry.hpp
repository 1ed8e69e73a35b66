#pragma once

#include <cmath>
#include <cstdint>

namespace evtrack {

/// Real-valued image-plane point in pixels. Pixel (i, j) has its center at
/// (i, j); y grows downward.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(const Point2& a, const Point2& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point2& a, const Point2& b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

/// Inclusive integer pixel rectangle.
struct PixelRect {
  std::int32_t min_x = 0;
  std::int32_t min_y = 0;
  std::int32_t max_x = 0;
  std::int32_t max_y = 0;

  /// Pixel-inclusive area: a single pixel has area 1.
  std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(max_x - min_x + 1) *
           static_cast<std::int64_t>(max_y - min_y + 1);
  }
  bool contains(const Point2& p) const noexcept {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Wraps an angle in degrees into [-180, 180).
inline double wrap_degrees(double deg) noexcept {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  w -= 180.0;
  if (w >= 180.0) w -= 360.0;
  return w;
}

/// Absolute angular difference in [0, 180].
inline double angular_error_deg(double a, double b) noexcept {
  return std::abs(wrap_degrees(a - b));
}

}  // namespace evtrack
