#include "evtrack/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr int kUnclassified = -2;
constexpr std::int64_t kMaxCells = std::int64_t{1} << 22;

/// Points bucketed by grid cell (counting sort), stored structure-of-arrays.
class CellGrid {
 public:
  CellGrid(std::span<const PixelPoint> points, double eps) {
    std::int32_t min_x = std::numeric_limits<std::int32_t>::max();
    std::int32_t min_y = min_x;
    std::int32_t max_x = std::numeric_limits<std::int32_t>::min();
    std::int32_t max_y = max_x;
    for (const auto& p : points) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    origin_x_ = min_x;
    origin_y_ = min_y;
    const double span_x = static_cast<double>(max_x) - min_x + 1.0;
    const double span_y = static_cast<double>(max_y) - min_y + 1.0;
    cell_ = std::max(eps, 1.0);
    while ((std::floor(span_x / cell_) + 1.0) * (std::floor(span_y / cell_) + 1.0) >
           static_cast<double>(kMaxCells)) {
      cell_ *= 2.0;
    }
    nx_ = static_cast<std::int32_t>(std::floor(span_x / cell_)) + 1;
    ny_ = static_cast<std::int32_t>(std::floor(span_y / cell_)) + 1;

    const std::size_t n = points.size();
    cell_of_.resize(n);
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of_[i] = cell_index(points[i]);
      ++start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];

    xs_.resize(n);
    ys_.resize(n);
    original_.resize(n);
    sorted_pos_.resize(n);
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t slot = fill[cell_of_[i]]++;
      xs_[slot] = points[i].x;
      ys_[slot] = points[i].y;
      original_[slot] = static_cast<std::uint32_t>(i);
      sorted_pos_[i] = slot;
    }
  }

  std::int32_t nx() const { return nx_; }
  std::int32_t ny() const { return ny_; }
  std::uint32_t begin(std::size_t cell) const { return start_[cell]; }
  std::uint32_t end(std::size_t cell) const { return start_[cell + 1]; }
  std::int32_t x(std::uint32_t slot) const { return xs_[slot]; }
  std::int32_t y(std::uint32_t slot) const { return ys_[slot]; }
  std::uint32_t original(std::uint32_t slot) const { return original_[slot]; }
  std::uint32_t slot_of(std::size_t input_index) const { return sorted_pos_[input_index]; }
  std::uint32_t cell_of_slot(std::uint32_t slot) const { return cell_of_[original_[slot]]; }

  /// Calls fn(slot) for every point within `limit` (squared distance) of slot s.
  template <typename Fn>
  void for_each_neighbor(std::uint32_t s, std::int64_t limit, Fn&& fn) const {
    const std::uint32_t c = cell_of_slot(s);
    const std::int32_t cx = static_cast<std::int32_t>(c % static_cast<std::uint32_t>(nx_));
    const std::int32_t cy = static_cast<std::int32_t>(c / static_cast<std::uint32_t>(nx_));
    const std::int64_t px = xs_[s];
    const std::int64_t py = ys_[s];
    for (std::int32_t gy = std::max(cy - 1, 0); gy <= std::min(cy + 1, ny_ - 1); ++gy) {
      for (std::int32_t gx = std::max(cx - 1, 0); gx <= std::min(cx + 1, nx_ - 1); ++gx) {
        const std::size_t cell = static_cast<std::size_t>(gy) * nx_ + gx;
        for (std::uint32_t t = start_[cell], e = start_[cell + 1]; t < e; ++t) {
          const std::int64_t dx = xs_[t] - px;
          const std::int64_t dy = ys_[t] - py;
          if (dx * dx + dy * dy <= limit) fn(t);
        }
      }
    }
  }

 private:
  std::uint32_t cell_index(const PixelPoint& p) const {
    const auto gx = static_cast<std::int64_t>(std::floor((p.x - origin_x_) / cell_));
    const auto gy = static_cast<std::int64_t>(std::floor((p.y - origin_y_) / cell_));
    return static_cast<std::uint32_t>(gy * nx_ + gx);
  }

  std::int32_t origin_x_ = 0;
  std::int32_t origin_y_ = 0;
  double cell_ = 1.0;
  std::int32_t nx_ = 1;
  std::int32_t ny_ = 1;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> cell_of_;
  std::vector<std::int32_t> xs_;
  std::vector<std::int32_t> ys_;
  std::vector<std::uint32_t> original_;
  std::vector<std::uint32_t> sorted_pos_;
};

/// Neighbor counts (self included) for every slot. Each unordered cell pair is
/// visited once through a forward half-stencil.
std::vector<std::uint32_t> count_neighbors(const CellGrid& grid, std::int64_t limit) {
  const std::size_t n = grid.end(static_cast<std::size_t>(grid.nx()) * grid.ny() - 1);
  std::vector<std::uint32_t> counts(n, 1);
  static constexpr int kStencil[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};

  for (std::int32_t cy = 0; cy < grid.ny(); ++cy) {
    for (std::int32_t cx = 0; cx < grid.nx(); ++cx) {
      const std::size_t cell = static_cast<std::size_t>(cy) * grid.nx() + cx;
      const std::uint32_t b = grid.begin(cell);
      const std::uint32_t e = grid.end(cell);
      if (b == e) continue;

      for (std::uint32_t i = b; i < e; ++i) {
        const std::int64_t xi = grid.x(i);
        const std::int64_t yi = grid.y(i);
        std::uint32_t local = 0;
        for (std::uint32_t j = i + 1; j < e; ++j) {
          const std::int64_t dx = grid.x(j) - xi;
          const std::int64_t dy = grid.y(j) - yi;
          if (dx * dx + dy * dy <= limit) {
            ++local;
            ++counts[j];
          }
        }
        counts[i] += local;
      }

      for (const auto& off : kStencil) {
        const std::int32_t ox = cx + off[0];
        const std::int32_t oy = cy + off[1];
        if (ox < 0 || oy < 0 || ox >= grid.nx() || oy >= grid.ny()) continue;
        const std::size_t other = static_cast<std::size_t>(oy) * grid.nx() + ox;
        const std::uint32_t ob = grid.begin(other);
        const std::uint32_t oe = grid.end(other);
        if (ob == oe) continue;
        for (std::uint32_t i = b; i < e; ++i) {
          const std::int64_t xi = grid.x(i);
          const std::int64_t yi = grid.y(i);
          std::uint32_t local = 0;
          for (std::uint32_t j = ob; j < oe; ++j) {
            const std::int64_t dx = grid.x(j) - xi;
            const std::int64_t dy = grid.y(j) - yi;
            if (dx * dx + dy * dy <= limit) {
              ++local;
              ++counts[j];
            }
          }
          counts[i] += local;
        }
      }
    }
  }
  return counts;
}

}  // namespace

void DbscanParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::InvalidParameter, "dbscan", "eps must be positive");
  }
  if (min_pts < 1) {
    throw Error(ErrorCode::InvalidParameter, "dbscan", "min_pts must be >= 1");
  }
}

Point2 centroid(std::span<const PixelPoint> members) {
  if (members.empty()) throw Error(ErrorCode::EmptyCluster, "dbscan", "centroid of no points");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : members) {
    sx += p.x;
    sy += p.y;
  }
  const auto n = static_cast<double>(members.size());
  return {sx / n, sy / n};
}

PixelRect bounding_box(std::span<const PixelPoint> members) {
  if (members.empty()) {
    throw Error(ErrorCode::EmptyCluster, "dbscan", "bounding box of no points");
  }
  PixelRect r{members[0].x, members[0].y, members[0].x, members[0].y};
  for (const auto& p : members) {
    r.min_x = std::min(r.min_x, p.x);
    r.min_y = std::min(r.min_y, p.y);
    r.max_x = std::max(r.max_x, p.x);
    r.max_y = std::max(r.max_y, p.y);
  }
  return r;
}

namespace {

/// Neighborhood of radius eps on the integer lattice: for each row offset dy
/// in [-r, r], columns within +-half_width[dy + r].
struct Disc {
  std::int32_t r = 0;
  std::vector<std::int32_t> half_width;

  explicit Disc(std::int64_t limit) {
    while ((static_cast<std::int64_t>(r) + 1) * (r + 1) <= limit) ++r;
    half_width.resize(static_cast<std::size_t>(2 * r + 1));
    for (std::int32_t dy = -r; dy <= r; ++dy) {
      const std::int64_t rest = limit - static_cast<std::int64_t>(dy) * dy;
      std::int32_t h = 0;
      while ((static_cast<std::int64_t>(h) + 1) * (h + 1) <= rest) ++h;
      half_width[static_cast<std::size_t>(dy + r)] = h;
    }
  }
};

constexpr std::int64_t kMaxRowsExtent = std::int64_t{1} << 20;
constexpr std::int32_t kMaxRowsRadius = 64;

/// Per input point: label and core flag.
struct Labeling {
  std::vector<int> labels;
  std::vector<bool> core;
  int n_clusters = 0;
};

Labeling label_grid(std::span<const PixelPoint> points, double eps, std::int64_t limit,
                    std::uint32_t min_pts) {
  const std::size_t n = points.size();
  const CellGrid grid(points, eps);
  const std::vector<std::uint32_t> counts = count_neighbors(grid, limit);

  std::vector<int> slot_label(n, kUnclassified);
  std::vector<std::uint32_t> queue;
  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t s = grid.slot_of(i);
    if (slot_label[s] != kUnclassified) continue;
    if (counts[s] < min_pts) {
      slot_label[s] = kNoise;
      continue;
    }
    const int cid = next_cluster++;
    slot_label[s] = cid;
    queue.clear();
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      grid.for_each_neighbor(queue[head], limit, [&](std::uint32_t t) {
        int& label = slot_label[t];
        if (label == kNoise) {
          label = cid;  // border point; noise points are never core
        } else if (label == kUnclassified) {
          label = cid;
          if (counts[t] >= min_pts) queue.push_back(t);
        }
      });
    }
  }

  Labeling out;
  out.labels.resize(n);
  out.core.resize(n);
  out.n_clusters = next_cluster;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t s = grid.slot_of(i);
    out.labels[i] = slot_label[s];
    out.core[i] = counts[s] >= min_pts;
  }
  return out;
}

/// Distinct pixels in row-major order with their multiplicities.
struct PixelRows {
  std::vector<std::int32_t> col;
  std::vector<std::uint32_t> weight;
  std::vector<std::int32_t> row_of;
  std::vector<std::uint32_t> row_begin;  // per relative row, plus an end marker
  std::vector<std::uint32_t> point_uid;  // per input point
  std::int32_t max_col = 0;
};

PixelRows build_rows(std::span<const PixelPoint> points, std::int32_t min_x, std::int32_t min_y,
                     std::int32_t max_x, std::int32_t max_y) {
  const std::size_t n = points.size();
  const auto w = static_cast<std::size_t>(static_cast<std::int64_t>(max_x) - min_x + 1);
  const auto h = static_cast<std::size_t>(static_cast<std::int64_t>(max_y) - min_y + 1);

  // Two counting-sort passes: by column, then stably by row.
  std::vector<std::uint32_t> by_col(n);
  {
    std::vector<std::uint32_t> start(w + 1, 0);
    for (const auto& p : points) ++start[static_cast<std::size_t>(p.x - min_x) + 1];
    for (std::size_t c = 1; c <= w; ++c) start[c] += start[c - 1];
    for (std::size_t i = 0; i < n; ++i) by_col[start[static_cast<std::size_t>(points[i].x - min_x)]++] = static_cast<std::uint32_t>(i);
  }
  std::vector<std::uint32_t> order(n);
  {
    std::vector<std::uint32_t> start(h + 1, 0);
    for (const auto& p : points) ++start[static_cast<std::size_t>(p.y - min_y) + 1];
    for (std::size_t r = 1; r <= h; ++r) start[r] += start[r - 1];
    for (std::uint32_t i : by_col) order[start[static_cast<std::size_t>(points[i].y - min_y)]++] = i;
  }

  PixelRows rows;
  rows.point_uid.resize(n);
  rows.row_begin.assign(h + 1, 0);
  std::int32_t last_x = 0;
  std::int32_t last_y = -1;
  for (std::uint32_t i : order) {
    const std::int32_t x = points[i].x - min_x;
    const std::int32_t y = points[i].y - min_y;
    if (y != last_y || x != last_x) {
      rows.col.push_back(x);
      rows.max_col = std::max(rows.max_col, x);
      rows.row_of.push_back(y);
      rows.weight.push_back(0);
      ++rows.row_begin[static_cast<std::size_t>(y) + 1];
      last_x = x;
      last_y = y;
    }
    ++rows.weight.back();
    rows.point_uid[i] = static_cast<std::uint32_t>(rows.col.size() - 1);
  }
  for (std::size_t r = 1; r <= h; ++r) rows.row_begin[r] += rows.row_begin[r - 1];
  return rows;
}

Labeling label_rows(std::span<const PixelPoint> points, const Disc& disc, std::uint32_t min_pts,
                    std::int32_t min_x, std::int32_t min_y, std::int32_t max_x, std::int32_t max_y) {
  const std::size_t n = points.size();
  const std::int32_t r = disc.r;
  const PixelRows rows = build_rows(points, min_x, min_y, max_x, max_y);
  const std::size_t n_unique = rows.col.size();
  const auto height = static_cast<std::int32_t>(rows.row_begin.size() - 1);

  // Exclusive running weight in row-major order, so a row segment sums in O(1).
  std::vector<std::uint64_t> cum(n_unique + 1, 0);
  for (std::size_t u = 0; u < n_unique; ++u) cum[u + 1] = cum[u] + rows.weight[u];

  // Coarse filter: the weight inside the cell-aligned square around the disc
  // bounds the neighbor count from above. Most noise pixels fail it and never
  // need an exact count.
  const std::int32_t width = rows.max_col + 1;
  const std::int32_t cs = std::max<std::int32_t>(1, (r + 3) / 4);
  const std::int64_t gw = (width + cs - 1) / cs;
  const std::int64_t gh = (height + cs - 1) / cs;
  const bool use_filter = gw * gh <= 4 * static_cast<std::int64_t>(n) + 4096;
  std::vector<std::uint64_t> sat;
  if (use_filter) {
    sat.assign(static_cast<std::size_t>((gw + 1) * (gh + 1)), 0);
    auto at = [&](std::int64_t gx, std::int64_t gy) -> std::uint64_t& {
      return sat[static_cast<std::size_t>(gy * (gw + 1) + gx)];
    };
    for (std::size_t u = 0; u < n_unique; ++u) {
      at(rows.col[u] / cs + 1, rows.row_of[u] / cs + 1) += rows.weight[u];
    }
    for (std::int64_t gy = 1; gy <= gh; ++gy) {
      for (std::int64_t gx = 1; gx <= gw; ++gx) {
        at(gx, gy) += at(gx - 1, gy) + at(gx, gy - 1) - at(gx - 1, gy - 1);
      }
    }
  }
  auto bound = [&](std::int32_t x, std::int32_t y) {
    const std::int64_t gx0 = std::max<std::int32_t>(0, x - r) / cs;
    const std::int64_t gy0 = std::max<std::int32_t>(0, y - r) / cs;
    const std::int64_t gx1 = std::min<std::int64_t>(gw, (std::min(width - 1, x + r)) / cs + 1);
    const std::int64_t gy1 = std::min<std::int64_t>(gh, (std::min(height - 1, y + r)) / cs + 1);
    auto at = [&](std::int64_t gx, std::int64_t gy) { return sat[static_cast<std::size_t>(gy * (gw + 1) + gx)]; };
    return at(gx1, gy1) - at(gx0, gy1) - at(gx1, gy0) + at(gx0, gy0);
  };

  std::vector<std::uint32_t> cand;
  for (std::uint32_t u = 0; u < n_unique; ++u) {
    if (!use_filter || bound(rows.col[u], rows.row_of[u]) >= min_pts) cand.push_back(u);
  }

  // first_at(yy, x): first distinct pixel of row yy with column >= x. A table
  // holds the answer at every block boundary and a short forward scan
  // finishes. Every candidate makes two lookups per disc row; blocks widen
  // only while the table would clearly outweigh that work, since the scan is
  // a poorly predicted branch.
  const std::int64_t budget = 16 * static_cast<std::int64_t>(cand.size()) * r + 4096;
  int shift = 0;
  while (shift < 24 && ((static_cast<std::int64_t>(width) >> shift) + 1) * height > budget) ++shift;
  const auto tw = (static_cast<std::size_t>(width) >> shift) + 1;
  std::vector<std::uint32_t> table(tw * static_cast<std::size_t>(height));
  for (std::int32_t y = 0; y < height; ++y) {
    const std::uint32_t b = rows.row_begin[static_cast<std::size_t>(y)];
    const std::uint32_t e = rows.row_begin[static_cast<std::size_t>(y) + 1];
    std::uint32_t* out = table.data() + static_cast<std::size_t>(y) * tw;
    std::size_t blk = 0;
    for (std::uint32_t u = b; u < e; ++u) {
      // Block boundaries in (previous column, this column] resolve to u.
      const auto last = static_cast<std::size_t>(rows.col[u]) >> shift;
      if (last >= blk) {
        std::fill(out + blk, out + last + 1, u);
        blk = last + 1;
      }
    }
    std::fill(out + blk, out + tw, e);
  }
  auto first_at = [&](std::int32_t yy, std::int32_t x) -> std::uint32_t {
    x = std::clamp(x, 0, width);
    const std::uint32_t e = rows.row_begin[static_cast<std::size_t>(yy) + 1];
    std::uint32_t u = table[static_cast<std::size_t>(yy) * tw + (static_cast<std::size_t>(x) >> shift)];
    while (u < e && rows.col[u] < x) ++u;
    return u;
  };

  // Dense inputs: a per-pixel summed-area table over the square inscribed in
  // the disc gives a lower bound, which settles most core pixels without the
  // exact count.
  std::int32_t inner = 0;
  while (inner < r && disc.half_width[static_cast<std::size_t>(inner + 1 + r)] >= inner + 1) ++inner;
  const auto pw = static_cast<std::size_t>(width) + 1;
  const bool use_inner = static_cast<std::int64_t>(pw) * (height + 1) <= 16 * static_cast<std::int64_t>(cand.size()) + 4096;
  std::vector<std::uint32_t> psum;
  if (use_inner) {
    psum.assign(pw * (static_cast<std::size_t>(height) + 1), 0);
    for (std::int32_t y = 0; y < height; ++y) {
      std::uint32_t* row = psum.data() + (static_cast<std::size_t>(y) + 1) * pw;
      const std::uint32_t* above = row - pw;
      for (std::uint32_t u = rows.row_begin[static_cast<std::size_t>(y)];
           u < rows.row_begin[static_cast<std::size_t>(y) + 1]; ++u) {
        row[static_cast<std::size_t>(rows.col[u]) + 1] = rows.weight[u];
      }
      for (std::size_t x = 1; x < pw; ++x) row[x] += row[x - 1];
      for (std::size_t x = 1; x < pw; ++x) row[x] += above[x];
    }
  }
  auto inner_weight = [&](std::int32_t x, std::int32_t y) -> std::uint64_t {
    const auto x0 = static_cast<std::size_t>(std::max(0, x - inner));
    const auto x1 = static_cast<std::size_t>(std::min(width, x + inner + 1));
    const auto y0 = static_cast<std::size_t>(std::max(0, y - inner));
    const auto y1 = static_cast<std::size_t>(std::min(height, y + inner + 1));
    return std::uint64_t{psum[y1 * pw + x1]} - psum[y0 * pw + x1] - psum[y1 * pw + x0] + psum[y0 * pw + x0];
  };

  std::vector<char> ucore(n_unique, 0);
  for (std::uint32_t u : cand) {
    const std::int32_t x = rows.col[u];
    const std::int32_t y = rows.row_of[u];
    if (use_inner && inner_weight(x, y) >= min_pts) {
      ucore[u] = 1;
      continue;
    }
    std::uint64_t count = 0;
    for (std::int32_t yy = std::max(0, y - r); yy <= std::min(height - 1, y + r); ++yy) {
      const std::int32_t hw = disc.half_width[static_cast<std::size_t>(yy - y + r)];
      count += cum[first_at(yy, x + hw + 1)] - cum[first_at(yy, x - hw)];
    }
    ucore[u] = count >= min_pts ? 1 : 0;
  }

  // skip[] leads to the next distinct pixel (in row-major order) that is not
  // in a cluster yet; n_unique is the final stop. Claimed pixels are spliced
  // out, so an expansion costs a search per disc row plus the pixels it
  // actually claims.
  std::vector<std::uint32_t> skip(n_unique + 1);
  for (std::size_t u = 0; u <= n_unique; ++u) skip[u] = static_cast<std::uint32_t>(u);
  auto find = [&skip](std::uint32_t at) {
    while (skip[at] != at) {
      const std::uint32_t next = skip[at];
      skip[at] = skip[next];
      at = next;
    }
    return at;
  };

  std::vector<int> ulabel(n_unique, kUnclassified);
  std::vector<std::uint32_t> queue;
  int next_cluster = 0;
  auto claim = [&](std::uint32_t u, int cid) {
    ulabel[u] = cid;
    skip[u] = u + 1;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t u0 = rows.point_uid[i];
    if (ulabel[u0] != kUnclassified) continue;
    if (!ucore[u0]) {
      ulabel[u0] = kNoise;  // still claimable as a border point
      continue;
    }
    const int cid = next_cluster++;
    claim(u0, cid);
    queue.clear();
    queue.push_back(u0);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t c = queue[head];
      const std::int32_t cx = rows.col[c];
      const std::int32_t cy = rows.row_of[c];
      for (std::int32_t dy = -r; dy <= r; ++dy) {
        const std::int32_t yy = cy + dy;
        if (yy < 0 || yy >= height) continue;
        const std::int32_t hw = disc.half_width[static_cast<std::size_t>(dy + r)];
        const std::uint32_t re = rows.row_begin[static_cast<std::size_t>(yy) + 1];
        for (std::uint32_t at = find(first_at(yy, cx - hw)); at < re && rows.col[at] <= cx + hw; at = find(at + 1)) {
          const bool was_unclassified = ulabel[at] == kUnclassified;
          claim(at, cid);
          if (was_unclassified && ucore[at]) queue.push_back(at);
        }
      }
    }
  }

  Labeling out;
  out.labels.resize(n);
  out.core.resize(n);
  out.n_clusters = next_cluster;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t u = rows.point_uid[i];
    out.labels[i] = ulabel[u];
    out.core[i] = ucore[u] != 0;
  }
  return out;
}

}  // namespace

Clustering cluster(std::span<const PixelPoint> points, const DbscanParams& params,
                   DbscanStrategy strategy) {
  params.validate();
  Clustering out;
  const std::size_t n = points.size();
  if (n == 0) return out;

  // d^2 is an integer, so d^2 <= eps^2 is equivalent to d^2 <= floor(eps^2).
  const auto limit = static_cast<std::int64_t>(std::floor(params.eps * params.eps));
  const auto min_pts = static_cast<std::uint32_t>(params.min_pts);

  std::int32_t min_x = points[0].x;
  std::int32_t min_y = points[0].y;
  std::int32_t max_x = min_x;
  std::int32_t max_y = min_y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }

  Labeling lab;
  const Disc disc(limit);
  const bool rows_ok = static_cast<std::int64_t>(max_x) - min_x < kMaxRowsExtent &&
                       static_cast<std::int64_t>(max_y) - min_y < kMaxRowsExtent;
  if (strategy == DbscanStrategy::Rows && !rows_ok) {
    throw Error(ErrorCode::InvalidParameter, "dbscan", "point extent too large for the row strategy");
  }
  // Sorting buffers scale with the extent, so sparse scatters go to the grid.
  const std::int64_t extent_budget = 16 * static_cast<std::int64_t>(points.size()) + 4096;
  const bool compact = static_cast<std::int64_t>(max_x) - min_x < extent_budget &&
                       static_cast<std::int64_t>(max_y) - min_y < extent_budget;
  const bool use_rows = strategy == DbscanStrategy::Rows ||
                        (strategy == DbscanStrategy::Auto && rows_ok && compact && disc.r <= kMaxRowsRadius);
  if (use_rows) {
    lab = label_rows(points, disc, min_pts, min_x, min_y, max_x, max_y);
  } else {
    lab = label_grid(points, params.eps, limit, min_pts);
  }

  out.labels = std::move(lab.labels);
  out.core = std::move(lab.core);
  out.clusters.resize(static_cast<std::size_t>(lab.n_clusters));
  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] >= 0) out.clusters[static_cast<std::size_t>(out.labels[i])].member_indices.push_back(i);
  }

  std::vector<PixelPoint> members;
  for (auto& c : out.clusters) {
    members.clear();
    members.reserve(c.member_indices.size());
    for (std::size_t idx : c.member_indices) members.push_back(points[idx]);
    c.centroid = centroid(members);
    c.bbox = bounding_box(members);
  }
  return out;
}

}  // namespace evtrack
