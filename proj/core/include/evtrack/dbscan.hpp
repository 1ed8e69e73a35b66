#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evtrack/geometry.hpp"

namespace evtrack {

struct PixelPoint {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// `min_pts` counts the query point itself.
struct DbscanParams {
  double eps = 15.0;
  int min_pts = 225;

  void validate() const;
};

struct Cluster {
  std::vector<std::size_t> member_indices;  // ascending input order
  Point2 centroid;
  PixelRect bbox;

  std::size_t size() const noexcept { return member_indices.size(); }
};

inline constexpr int kNoise = -1;

struct Clustering {
  std::vector<int> labels;  // per input point: cluster index or kNoise
  std::vector<bool> core;   // per input point
  std::vector<Cluster> clusters;
};

/// How neighborhoods are found. Both give identical labels.
enum class DbscanStrategy {
  Auto,
  /// Uniform grid with cells at least eps wide; a query touches 3x3 cells.
  Grid,
  /// Duplicate pixels are merged into weighted pixels sorted by row, and
  /// neighbor counts come from windows sliding along each row an eps disc
  /// spans. Cost no longer grows with the number of events stacked on one
  /// pixel. Auto picks it unless eps or the point extent is very large.
  Rows,
};

/// Classic DBSCAN with Euclidean distance (neighbors satisfy d <= eps).
///
/// Points are scanned in input order and clusters are numbered in order of
/// discovery. A border point reachable from several clusters keeps the first
/// cluster that claims it.
Clustering cluster(std::span<const PixelPoint> points, const DbscanParams& params,
                   DbscanStrategy strategy = DbscanStrategy::Auto);

/// Arithmetic mean of the coordinates. Throws EmptyCluster on empty input.
Point2 centroid(std::span<const PixelPoint> members);

/// Tightest axis-aligned rectangle. Throws EmptyCluster on empty input.
PixelRect bounding_box(std::span<const PixelPoint> members);

}  // namespace evtrack
