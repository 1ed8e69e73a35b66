#pragma once

#include <array>

#include "evtrack/geometry.hpp"

namespace evtrack {

/// Row-major 3x3 projective map, normalized so h[2][2] == 1.
struct Homography {
  std::array<std::array<double, 3>, 3> h{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

  static Homography identity() { return {}; }
};

using Quad = std::array<Point2, 4>;

/// Exact 4-point DLT: coordinates are normalized (centroid to the origin, mean
/// distance sqrt(2)) and the 8x8 system is solved by Gaussian elimination with
/// partial pivoting. Throws DegenerateConfiguration when three points of
/// either quad are collinear or the system is singular.
Homography solve_homography(const Quad& src, const Quad& dst);

/// Throws PointAtInfinity when the homogeneous denominator vanishes.
Point2 apply(const Homography& H, const Point2& p);

/// Throws DegenerateConfiguration for a singular matrix.
Homography inverse(const Homography& H);

/// The map p -> apply(a, apply(b, p)).
Homography compose(const Homography& a, const Homography& b);

double determinant(const Homography& H) noexcept;

}  // namespace evtrack
