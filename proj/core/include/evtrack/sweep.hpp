#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evtrack/metrics.hpp"
#include "evtrack/run_config.hpp"
#include "evtrack/simulator.hpp"

namespace evtrack {

enum class SweepParam { MinPtsFull, MinPtsPartial, TaUs, Eps, SigmaPx, NoiseRate };

SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam p) noexcept;

/// "a,b,c" or "start:stop:step" (stop inclusive).
std::vector<double> parse_sweep_values(std::string_view text);

struct ScenarioSpec {
  int n_robots = 1;
  PathPattern pattern = PathPattern::Circle;
  MotorPower power = MotorPower::Full;
  std::int64_t duration_us = 30'000'000;
  std::optional<double> noise_rate_hz_per_px;  // scenario default when empty
  double contrast_scale = 1.0;
  /// Pauses applied to every robot's path.
  std::vector<Pause> pauses;
};

struct CellResult {
  EvalReport report;
  ClusterQualityReport full;     // against the chassis area
  ClusterQualityReport partial;  // against one third of it
};

/// default_scenario() with the scenario overrides applied. Truth frames follow
/// the config's step and alignment.
SimulationInput scenario_input(const ScenarioSpec& scenario, const RunConfig& config, std::uint64_t seed);

/// One simulate + track + evaluate cycle. Frames before t_a are skipped as
/// warm-up.
CellResult run_cell(const ScenarioSpec& scenario, const RunConfig& config, std::uint64_t seed);

/// Same as run_cell, keeping the intermediate products.
struct CellRun {
  SimulationInput input;
  SimulationOutput sim;
  std::vector<StepResult> steps;
  std::vector<FrameHypothesis> hypotheses;
  CellResult result;
};
CellRun run_cell_detailed(const ScenarioSpec& scenario, const RunConfig& config, std::uint64_t seed);

struct SweepSpec {
  SweepParam param = SweepParam::MinPtsFull;
  std::vector<double> values;
  ScenarioSpec scenario;
  int repeats = 3;
  std::uint64_t seed_base = 1;
  RunConfig base;
  int jobs = 1;

  void validate() const;
};

struct SweepRow {
  double param_value = 0.0;
  int repeat = 0;
  std::string metric;
  double value = 0.0;  // NaN when the metric is undefined for the cell
};

/// Cells run on up to `jobs` threads; rows come out in (value, repeat) order
/// regardless. A cell that throws contributes a single `error` = 1 row.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace evtrack
