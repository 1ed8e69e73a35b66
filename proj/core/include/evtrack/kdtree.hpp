#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "evtrack/geometry.hpp"

namespace evtrack {

using TrackId = std::uint32_t;

enum class Axis : std::uint8_t { X = 0, Y = 1 };

struct KdNode {
  double x = 0.0;
  double y = 0.0;
  TrackId id = 0;
  Axis split_axis = Axis::X;
  std::int32_t left = -1;   // index into KdTree2::nodes(), -1 if absent
  std::int32_t right = -1;
};

struct KdEntry {
  double x = 0.0;
  double y = 0.0;
  TrackId id = 0;
};

struct NearestResult {
  TrackId id = 0;
  Point2 point;
  double distance = 0.0;
};

/// Two-dimensional k-d tree over track centroids. Left subtrees hold
/// coordinates <= the node's on its split axis, right subtrees strictly
/// greater. Axes alternate X, Y, X, ... from the root.
class KdTree2 {
 public:
  KdTree2() = default;

  /// Median-split construction; ties on the split axis go left.
  static KdTree2 rebuild(std::span<const KdEntry> points);

  /// Alternating-axis descent. Throws DuplicateId.
  void insert(double x, double y, TrackId id);

  /// Exact nearest neighbor; ties broken by smallest id. Throws EmptyTree.
  NearestResult nearest(double x, double y) const;

  /// Nearest among nodes whose id passes `accept`; nullopt if none do.
  std::optional<NearestResult> nearest_if(double x, double y,
                                          const std::function<bool(TrackId)>& accept) const;

  bool contains(TrackId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  std::int32_t root() const noexcept { return root_; }
  std::span<const KdNode> nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

 private:
  std::int32_t build(std::span<KdEntry> items, Axis axis);

  std::vector<KdNode> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace evtrack
