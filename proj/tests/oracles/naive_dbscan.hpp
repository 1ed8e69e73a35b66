#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "evtrack/dbscan.hpp"

namespace oracle {

struct NaiveClustering {
  std::vector<int> labels;
  std::vector<bool> core;
};

/// Textbook O(n^2) DBSCAN. Same scan order and claiming rule as the library:
/// points are visited in input order and a border point keeps the first
/// cluster that reaches it.
inline NaiveClustering naive_dbscan(std::span<const evtrack::PixelPoint> pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  const double eps2 = eps * eps;
  auto within = [&](std::size_t a, std::size_t b) {
    const double dx = pts[a].x - pts[b].x;
    const double dy = pts[a].y - pts[b].y;
    return dx * dx + dy * dy <= eps2;
  };
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (within(i, j)) nbrs[i].push_back(j);
    }
  }
  NaiveClustering out;
  out.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) out.core[i] = nbrs[i].size() >= static_cast<std::size_t>(min_pts);

  constexpr int kUnvisited = -2;
  out.labels.assign(n, kUnvisited);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] != kUnvisited) continue;
    if (!out.core[i]) {
      out.labels[i] = evtrack::kNoise;
      continue;
    }
    const int c = next++;
    out.labels[i] = c;
    std::deque<std::size_t> queue(nbrs[i].begin(), nbrs[i].end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (out.labels[q] == evtrack::kNoise) out.labels[q] = c;
      if (out.labels[q] != kUnvisited) continue;
      out.labels[q] = c;
      if (out.core[q]) queue.insert(queue.end(), nbrs[q].begin(), nbrs[q].end());
    }
  }
  return out;
}

}  // namespace oracle
