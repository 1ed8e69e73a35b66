#include "evtrack/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "spatial_index";

double coord(const KdNode& n, Axis a) { return a == Axis::X ? n.x : n.y; }
double coord(const KdEntry& e, Axis a) { return a == Axis::X ? e.x : e.y; }
double coord(double x, double y, Axis a) { return a == Axis::X ? x : y; }
Axis other(Axis a) { return a == Axis::X ? Axis::Y : Axis::X; }

struct Best {
  std::int32_t node = -1;
  double d2 = std::numeric_limits<double>::infinity();
  TrackId id = 0;

  bool improved_by(double cand_d2, TrackId cand_id) const {
    return node < 0 || cand_d2 < d2 || (cand_d2 == d2 && cand_id < id);
  }
};

void search(const std::vector<KdNode>& nodes, std::int32_t at, double qx, double qy,
            const std::function<bool(TrackId)>* accept, Best& best) {
  if (at < 0) return;
  const KdNode& n = nodes[static_cast<std::size_t>(at)];
  const double dx = n.x - qx;
  const double dy = n.y - qy;
  const double d2 = dx * dx + dy * dy;
  if ((accept == nullptr || (*accept)(n.id)) && best.improved_by(d2, n.id)) {
    best.node = at;
    best.d2 = d2;
    best.id = n.id;
  }
  const double diff = coord(qx, qy, n.split_axis) - coord(n, n.split_axis);
  const std::int32_t near = diff <= 0.0 ? n.left : n.right;
  const std::int32_t far = diff <= 0.0 ? n.right : n.left;
  search(nodes, near, qx, qy, accept, best);
  // Non-strict so an equidistant node with a smaller id is never pruned.
  if (best.node < 0 || diff * diff <= best.d2) search(nodes, far, qx, qy, accept, best);
}

std::size_t depth_of(const std::vector<KdNode>& nodes, std::int32_t at) {
  if (at < 0) return 0;
  const KdNode& n = nodes[static_cast<std::size_t>(at)];
  return 1 + std::max(depth_of(nodes, n.left), depth_of(nodes, n.right));
}

}  // namespace

KdTree2 KdTree2::rebuild(std::span<const KdEntry> points) {
  std::unordered_set<TrackId> seen;
  for (const auto& p : points) {
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::DuplicateId, kModule, "id " + std::to_string(p.id));
    }
  }
  KdTree2 tree;
  std::vector<KdEntry> items(points.begin(), points.end());
  tree.nodes_.reserve(items.size());
  tree.root_ = tree.build(items, Axis::X);
  return tree;
}

std::int32_t KdTree2::build(std::span<KdEntry> items, Axis axis) {
  if (items.empty()) return -1;
  std::sort(items.begin(), items.end(), [axis](const KdEntry& a, const KdEntry& b) {
    const double ca = coord(a, axis);
    const double cb = coord(b, axis);
    return ca < cb || (ca == cb && a.id < b.id);
  });
  std::size_t m = (items.size() - 1) / 2;
  // Entries equal to the median on this axis must stay on the left.
  while (m + 1 < items.size() && coord(items[m + 1], axis) == coord(items[m], axis)) ++m;

  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(KdNode{items[m].x, items[m].y, items[m].id, axis, -1, -1});
  const std::int32_t l = build(items.subspan(0, m), other(axis));
  const std::int32_t r = build(items.subspan(m + 1), other(axis));
  nodes_[static_cast<std::size_t>(index)].left = l;
  nodes_[static_cast<std::size_t>(index)].right = r;
  return index;
}

void KdTree2::insert(double x, double y, TrackId id) {
  if (contains(id)) throw Error(ErrorCode::DuplicateId, kModule, "id " + std::to_string(id));
  const auto index = static_cast<std::int32_t>(nodes_.size());
  if (root_ < 0) {
    nodes_.push_back(KdNode{x, y, id, Axis::X, -1, -1});
    root_ = index;
    return;
  }
  std::int32_t at = root_;
  while (true) {
    KdNode& n = nodes_[static_cast<std::size_t>(at)];
    const bool go_left = coord(x, y, n.split_axis) <= coord(n, n.split_axis);
    std::int32_t& child = go_left ? n.left : n.right;
    if (child < 0) {
      const Axis axis = other(n.split_axis);
      child = index;
      nodes_.push_back(KdNode{x, y, id, axis, -1, -1});
      return;
    }
    at = child;
  }
}

NearestResult KdTree2::nearest(double x, double y) const {
  if (root_ < 0) throw Error(ErrorCode::EmptyTree, kModule, "nearest on empty tree");
  Best best;
  search(nodes_, root_, x, y, nullptr, best);
  const KdNode& n = nodes_[static_cast<std::size_t>(best.node)];
  return {n.id, {n.x, n.y}, std::sqrt(best.d2)};
}

std::optional<NearestResult> KdTree2::nearest_if(
    double x, double y, const std::function<bool(TrackId)>& accept) const {
  Best best;
  search(nodes_, root_, x, y, &accept, best);
  if (best.node < 0) return std::nullopt;
  const KdNode& n = nodes_[static_cast<std::size_t>(best.node)];
  return NearestResult{n.id, {n.x, n.y}, std::sqrt(best.d2)};
}

bool KdTree2::contains(TrackId id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [id](const KdNode& n) { return n.id == id; });
}

std::size_t KdTree2::depth() const { return depth_of(nodes_, root_); }

}  // namespace evtrack
