#include <benchmark/benchmark.h>

#include <random>

#include "evtrack/kdtree.hpp"

using namespace evtrack;

namespace {

std::vector<KdEntry> random_entries(std::size_t n) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 640.0);
  std::vector<KdEntry> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({u(rng), u(rng), static_cast<TrackId>(i + 1)});
  return out;
}

void BM_KdRebuild(benchmark::State& state) {
  const auto pts = random_entries(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    KdTree2 t = KdTree2::rebuild(pts);
    benchmark::DoNotOptimize(t.root());
  }
}

void BM_KdInsert(benchmark::State& state) {
  const auto pts = random_entries(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    KdTree2 t;
    for (const KdEntry& e : pts) t.insert(e.x, e.y, e.id);
    benchmark::DoNotOptimize(t.root());
  }
}

void BM_KdNearest(benchmark::State& state) {
  const KdTree2 t = KdTree2::rebuild(random_entries(static_cast<std::size_t>(state.range(0))));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 640.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.nearest(u(rng), u(rng)).id);
  }
}

}  // namespace

BENCHMARK(BM_KdRebuild)->RangeMultiplier(8)->Range(8, 4096);
BENCHMARK(BM_KdInsert)->RangeMultiplier(8)->Range(8, 4096);
BENCHMARK(BM_KdNearest)->RangeMultiplier(8)->Range(8, 4096);

BENCHMARK_MAIN();
