#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "evtrack/dbscan.hpp"
#include "evtrack/error.hpp"
#include "oracles/naive_dbscan.hpp"

using namespace evtrack;

namespace {

constexpr DbscanStrategy kStrategies[] = {DbscanStrategy::Auto, DbscanStrategy::Grid, DbscanStrategy::Rows};

const char* name(DbscanStrategy s) {
  switch (s) {
    case DbscanStrategy::Auto: return "auto";
    case DbscanStrategy::Grid: return "grid";
    case DbscanStrategy::Rows: return "rows";
  }
  return "?";
}

/// Random blobs plus background scatter, with deliberate duplicate pixels.
std::vector<PixelPoint> random_scene(std::mt19937_64& rng, std::size_t n, int w, int h) {
  std::vector<PixelPoint> pts;
  std::uniform_int_distribution<int> n_blobs(0, 4);
  const int blobs = n_blobs(rng);
  std::vector<std::pair<int, int>> centers;
  for (int b = 0; b < blobs; ++b) {
    centers.emplace_back(static_cast<int>(rng() % static_cast<unsigned>(w)),
                         static_cast<int>(rng() % static_cast<unsigned>(h)));
  }
  std::normal_distribution<double> spread(0.0, 6.0 + static_cast<double>(rng() % 10));
  while (pts.size() < n) {
    const auto roll = rng() % 10;
    if (roll == 0 && !pts.empty()) {
      pts.push_back(pts[rng() % pts.size()]);
    } else if (roll < 6 && !centers.empty()) {
      const auto& c = centers[rng() % centers.size()];
      const int x = std::clamp(c.first + static_cast<int>(std::lround(spread(rng))), 0, w - 1);
      const int y = std::clamp(c.second + static_cast<int>(std::lround(spread(rng))), 0, h - 1);
      pts.push_back({x, y});
    } else {
      pts.push_back({static_cast<int>(rng() % static_cast<unsigned>(w)),
                     static_cast<int>(rng() % static_cast<unsigned>(h))});
    }
  }
  return pts;
}

void expect_matches_oracle(const std::vector<PixelPoint>& pts, double eps, int min_pts) {
  const oracle::NaiveClustering ref = oracle::naive_dbscan(pts, eps, min_pts);
  for (DbscanStrategy s : kStrategies) {
    const Clustering got = cluster(pts, {eps, min_pts}, s);
    ASSERT_EQ(got.labels, ref.labels) << name(s) << " eps=" << eps << " min_pts=" << min_pts << " n=" << pts.size();
    ASSERT_EQ(got.core, ref.core) << name(s);
  }
}

}  // namespace

TEST(Dbscan, EmptyInput) {
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster({}, {5.0, 3}, s);
    EXPECT_TRUE(c.clusters.empty());
    EXPECT_TRUE(c.labels.empty());
  }
}

TEST(Dbscan, LineOfFiveIsOneCluster) {
  const std::vector<PixelPoint> pts{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster(pts, {1.5, 3}, s);
    ASSERT_EQ(c.clusters.size(), 1u) << name(s);
    EXPECT_EQ(c.clusters[0].size(), 5u);
    EXPECT_EQ(c.labels, (std::vector<int>{0, 0, 0, 0, 0}));
    // The endpoints have only 2 neighbors: border points.
    EXPECT_EQ(c.core, (std::vector<bool>{false, true, true, true, false}));
  }
}

TEST(Dbscan, LonePointIsNoise) {
  const std::vector<PixelPoint> pts{{0, 0}};
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster(pts, {5.0, 2}, s);
    EXPECT_TRUE(c.clusters.empty());
    EXPECT_EQ(c.labels, (std::vector<int>{kNoise}));
  }
}

TEST(Dbscan, InvalidParameters) {
  const std::vector<PixelPoint> pts{{0, 0}};
  for (const DbscanParams p : {DbscanParams{0.0, 3}, DbscanParams{-1.0, 3}, DbscanParams{5.0, 0}}) {
    try {
      cluster(pts, p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
      EXPECT_EQ(e.module(), "dbscan");
    }
  }
}

TEST(Dbscan, DistanceIsInclusive) {
  // (0,0) and (3,4) are exactly 5 apart.
  const std::vector<PixelPoint> pts{{0, 0}, {3, 4}};
  for (DbscanStrategy s : kStrategies) {
    EXPECT_EQ(cluster(pts, {5.0, 2}, s).clusters.size(), 1u) << name(s);
    EXPECT_EQ(cluster(pts, {4.999, 2}, s).clusters.size(), 0u) << name(s);
  }
}

TEST(Dbscan, DuplicatesRaiseDensity) {
  const std::vector<PixelPoint> pts(4, PixelPoint{7, 7});
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster(pts, {1.0, 4}, s);
    ASSERT_EQ(c.clusters.size(), 1u);
    EXPECT_EQ(c.clusters[0].member_indices, (std::vector<std::size_t>{0, 1, 2, 3}));
  }
}

TEST(Dbscan, BorderPointJoinsFirstClaimingCluster) {
  // Two dense columns with a border point midway between them.
  std::vector<PixelPoint> pts;
  for (int y = 0; y < 3; ++y) pts.push_back({0, y});
  pts.push_back({2, 1});  // within eps of (0,1) and (4,1), core of neither side
  for (int y = 0; y < 3; ++y) pts.push_back({4, y});
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster(pts, {2.0, 4}, s);
    ASSERT_EQ(c.clusters.size(), 2u) << name(s);
    EXPECT_EQ(c.labels[3], 0) << name(s);
  }
  // Reordering so the right column is scanned first hands the border to it.
  std::rotate(pts.begin(), pts.begin() + 4, pts.end());
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster(pts, {2.0, 4}, s);
    EXPECT_EQ(c.labels[6], 0) << name(s);
  }
}

TEST(Dbscan, MinPtsOneMeansNoNoise) {
  std::mt19937_64 rng(1);
  const auto pts = random_scene(rng, 300, 200, 200);
  for (DbscanStrategy s : kStrategies) {
    const Clustering c = cluster(pts, {3.0, 1}, s);
    for (int l : c.labels) EXPECT_NE(l, kNoise);
  }
}

TEST(Dbscan, ClusterSummaries) {
  std::mt19937_64 rng(2);
  const auto pts = random_scene(rng, 400, 300, 200);
  const Clustering c = cluster(pts, {8.0, 6});
  std::size_t labeled = 0;
  for (std::size_t k = 0; k < c.clusters.size(); ++k) {
    const Cluster& cl = c.clusters[k];
    ASSERT_FALSE(cl.member_indices.empty());
    EXPECT_TRUE(std::is_sorted(cl.member_indices.begin(), cl.member_indices.end()));
    std::vector<PixelPoint> members;
    bool has_core = false;
    for (std::size_t i : cl.member_indices) {
      EXPECT_EQ(c.labels[i], static_cast<int>(k));
      members.push_back(pts[i]);
      has_core = has_core || c.core[i];
    }
    EXPECT_TRUE(has_core);
    EXPECT_EQ(cl.bbox, bounding_box(members));
    EXPECT_EQ(cl.centroid, centroid(members));
    EXPECT_TRUE(cl.bbox.contains(cl.centroid));
    labeled += cl.size();
  }
  EXPECT_EQ(labeled, static_cast<std::size_t>(std::count_if(c.labels.begin(), c.labels.end(),
                                                            [](int l) { return l != kNoise; })));
}

TEST(Dbscan, EveryMemberWithinEpsOfACore) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_scene(rng, 300, 150, 150);
    const double eps = 4.0 + static_cast<double>(trial % 5);
    const Clustering c = cluster(pts, {eps, 5});
    for (const Cluster& cl : c.clusters) {
      for (std::size_t i : cl.member_indices) {
        bool near_core = false;
        for (std::size_t j : cl.member_indices) {
          if (!c.core[j]) continue;
          const double dx = pts[i].x - pts[j].x;
          const double dy = pts[i].y - pts[j].y;
          near_core = near_core || dx * dx + dy * dy <= eps * eps;
        }
        EXPECT_TRUE(near_core);
      }
    }
  }
}

TEST(Dbscan, CoreComponentsArePermutationInvariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = random_scene(rng, 300, 200, 200);
    const DbscanParams p{6.0, 5};
    const Clustering a = cluster(pts, p);

    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<PixelPoint> shuffled;
    for (std::size_t i : perm) shuffled.push_back(pts[i]);
    const Clustering b = cluster(shuffled, p);

    // Core sets per component, keyed by original index.
    auto components = [&](const Clustering& c, auto original_index) {
      std::map<int, std::set<std::size_t>> by_label;
      for (std::size_t i = 0; i < c.labels.size(); ++i) {
        if (c.core[i]) by_label[c.labels[i]].insert(original_index(i));
      }
      std::set<std::set<std::size_t>> out;
      for (auto& [label, members] : by_label) out.insert(members);
      return out;
    };
    EXPECT_EQ(components(a, [](std::size_t i) { return i; }),
              components(b, [&](std::size_t i) { return perm[i]; }));
  }
}

TEST(Dbscan, RowsRejectsHugeExtent) {
  const std::vector<PixelPoint> pts{{0, 0}, {1 << 21, 0}};
  try {
    cluster(pts, {2.0, 1}, DbscanStrategy::Rows);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
  }
  EXPECT_EQ(cluster(pts, {2.0, 1}, DbscanStrategy::Auto).clusters.size(), 2u);
  EXPECT_EQ(cluster(pts, {2.0, 1}, DbscanStrategy::Grid).clusters.size(), 2u);
}

TEST(DbscanOracle, SmallRandomInstances) {
  std::mt19937_64 rng(20261017);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng() % 501;
    const int side = 20 + static_cast<int>(rng() % 300);
    const auto pts = random_scene(rng, n, side, side);
    const double eps = 1.0 + static_cast<double>(rng() % 29000) / 1000.0;
    const int min_pts = 1 + static_cast<int>(rng() % 50);
    expect_matches_oracle(pts, eps, min_pts);
  }
}

TEST(DbscanOracle, DenseEventLikeWindows) {
  // Many events stacked on few pixels, as in real windows.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PixelPoint> pts;
    const int cx = 50 + static_cast<int>(rng() % 100);
    const int cy = 50 + static_cast<int>(rng() % 100);
    for (int i = 0; i < 1500; ++i) {
      if (rng() % 5 == 0) {
        pts.push_back({static_cast<int>(rng() % 200), static_cast<int>(rng() % 200)});
      } else {
        pts.push_back({cx + static_cast<int>(rng() % 24), cy + static_cast<int>(rng() % 4)});
      }
    }
    expect_matches_oracle(pts, 15.0, 60 + static_cast<int>(rng() % 200));
    expect_matches_oracle(pts, 2.5, 5);
  }
}

TEST(DbscanOracle, LargeEps) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = random_scene(rng, 400, 500, 500);
    expect_matches_oracle(pts, 70.0 + static_cast<double>(trial), 4);
  }
}

TEST(Centroid, Examples) {
  EXPECT_EQ(centroid(std::vector<PixelPoint>{{0, 0}, {2, 0}}), (Point2{1.0, 0.0}));
  EXPECT_EQ(centroid(std::vector<PixelPoint>{{1, 1}}), (Point2{1.0, 1.0}));
  EXPECT_EQ(centroid(std::vector<PixelPoint>{{0, 0}, {0, 3}, {3, 0}, {3, 3}}), (Point2{1.5, 1.5}));
}

TEST(Centroid, EmptyThrows) {
  try {
    centroid({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCluster);
  }
}

TEST(BoundingBox, Examples) {
  const PixelRect a = bounding_box(std::vector<PixelPoint>{{2, 3}});
  EXPECT_EQ(a, (PixelRect{2, 3, 2, 3}));
  EXPECT_EQ(a.area(), 1);
  const PixelRect b = bounding_box(std::vector<PixelPoint>{{0, 0}, {9, 4}});
  EXPECT_EQ(b, (PixelRect{0, 0, 9, 4}));
  EXPECT_EQ(b.area(), 50);
  const PixelRect c = bounding_box(std::vector<PixelPoint>{{1, 1}, {1, 5}, {4, 2}});
  EXPECT_EQ(c, (PixelRect{1, 1, 4, 5}));
  EXPECT_EQ(c.area(), 20);
}

TEST(BoundingBox, EmptyThrows) {
  try {
    bounding_box({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCluster);
  }
}
