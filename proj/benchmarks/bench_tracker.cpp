#include <benchmark/benchmark.h>

#include "evtrack/simulator.hpp"
#include "evtrack/tracker.hpp"

using namespace evtrack;

namespace {

/// Windows of a 4-robot square run; range(0) is the noise rate in mHz/px.
void BM_TrackerStep(benchmark::State& state) {
  SimulationInput in = default_scenario(4, PathPattern::Square, MotorPower::Full, 2);
  in.duration_us = 2'000'000;
  in.noise.rate_hz_per_px = static_cast<double>(state.range(0)) / 1000.0;
  const SimulationOutput sim = simulate(in);
  const auto windows = window_events(sim.events, kDefaultAccumulationUs, kDefaultStepUs);
  std::size_t events = 0;
  std::size_t i = 0;
  Tracker tracker{TrackerConfig{}};
  for (auto _ : state) {
    const EventWindow& w = windows[i++ % windows.size()];
    StepResult r = tracker.step(w);
    benchmark::DoNotOptimize(r.detections.data());
    events += w.events.size();
  }
  state.counters["events_per_window"] =
      benchmark::Counter(static_cast<double>(events) / static_cast<double>(state.iterations()));
}

}  // namespace

BENCHMARK(BM_TrackerStep)->Arg(0)->Arg(500)->Arg(3000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
