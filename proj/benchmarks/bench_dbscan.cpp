#include <benchmark/benchmark.h>

#include <random>

#include "evtrack/dbscan.hpp"

using namespace evtrack;

namespace {

/// Four dense 24x24 blobs plus uniform noise over 640x480.
std::vector<PixelPoint> blobs_and_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PixelPoint> pts;
  pts.reserve(n);
  const PixelPoint centers[4] = {{150, 120}, {450, 120}, {150, 360}, {450, 360}};
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      pts.push_back({static_cast<std::int32_t>(rng() % 640), static_cast<std::int32_t>(rng() % 480)});
    } else {
      const PixelPoint c = centers[i % 4];
      pts.push_back({c.x + static_cast<std::int32_t>(rng() % 24) - 12, c.y + static_cast<std::int32_t>(rng() % 24) - 12});
    }
  }
  return pts;
}

void run(benchmark::State& state, DbscanStrategy strategy) {
  const auto pts = blobs_and_noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    Clustering c = cluster(pts, {15.0, 225}, strategy);
    benchmark::DoNotOptimize(c.labels.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DbscanGrid(benchmark::State& state) { run(state, DbscanStrategy::Grid); }
void BM_DbscanRows(benchmark::State& state) { run(state, DbscanStrategy::Rows); }
void BM_DbscanAuto(benchmark::State& state) { run(state, DbscanStrategy::Auto); }

}  // namespace

BENCHMARK(BM_DbscanGrid)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DbscanRows)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DbscanAuto)->Arg(50'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
