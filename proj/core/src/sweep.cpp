#include "evtrack/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "evtrack/error.hpp"
#include "evtrack/io.hpp"
#include "evtrack/pipeline.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidParameter, kModule, what);
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    invalid("bad sweep value '" + std::string(s) + "'");
  }
  return v;
}

int as_int(double v, const char* what) {
  if (v != std::floor(v) || v < 1 || v > std::numeric_limits<int>::max()) {
    invalid(std::string(what) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

/// Applies the swept value; noise rate lives on the scenario.
void apply_param(SweepParam p, double v, RunConfig& config, ScenarioSpec& scenario) {
  switch (p) {
    case SweepParam::MinPtsFull: config.min_pts_full = as_int(v, "min_pts_full"); break;
    case SweepParam::MinPtsPartial: config.min_pts_partial = as_int(v, "min_pts_partial"); break;
    case SweepParam::TaUs: config.t_a_us = as_int(v, "t_a_us"); break;
    case SweepParam::Eps: config.eps = v; break;
    case SweepParam::SigmaPx: config.sigma_px = v; break;
    case SweepParam::NoiseRate: scenario.noise_rate_hz_per_px = v; break;
  }
}

double or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::pair<std::string, double>> metrics_of(const CellResult& r) {
  const EvalReport& e = r.report;
  auto n = [](std::size_t v) { return static_cast<double>(v); };
  return {
      {"precision", e.precision},
      {"recall", e.recall},
      {"tp", n(e.tp)},
      {"fp", n(e.fp)},
      {"fn", n(e.fn)},
      {"mae_distance_cm", or_nan(e.mae_distance_cm)},
      {"mae_theta_deg", or_nan(e.mae_theta_deg)},
      {"mota", or_nan(e.mota)},
      {"misses", n(e.misses)},
      {"false_positives", n(e.false_positives)},
      {"mismatches", n(e.mismatches)},
      {"gt_total", n(e.gt_total)},
      {"n_frames", n(e.n_frames)},
      {"n_avg_clusters", r.full.n_avg_clusters},
      {"a_ratio", r.full.a_ratio},
      {"n_avg_clusters_partial", r.partial.n_avg_clusters},
      {"a_ratio_partial", r.partial.a_ratio},
  };
}

}  // namespace

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "min_pts_full") return SweepParam::MinPtsFull;
  if (name == "min_pts_partial") return SweepParam::MinPtsPartial;
  if (name == "t_a_us") return SweepParam::TaUs;
  if (name == "eps") return SweepParam::Eps;
  if (name == "sigma_px") return SweepParam::SigmaPx;
  if (name == "noise_rate") return SweepParam::NoiseRate;
  invalid("unknown sweep parameter '" + std::string(name) + "'");
}

std::string_view to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::MinPtsFull: return "min_pts_full";
    case SweepParam::MinPtsPartial: return "min_pts_partial";
    case SweepParam::TaUs: return "t_a_us";
    case SweepParam::Eps: return "eps";
    case SweepParam::SigmaPx: return "sigma_px";
    case SweepParam::NoiseRate: return "noise_rate";
  }
  return "?";
}

std::vector<double> parse_sweep_values(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const std::size_t a = text.find(':');
    const std::size_t b = text.find(':', a + 1);
    if (b == std::string_view::npos) invalid("range must be start:stop:step");
    const double start = parse_double(text.substr(0, a));
    const double stop = parse_double(text.substr(a + 1, b - a - 1));
    const double step = parse_double(text.substr(b + 1));
    if (!(step > 0.0) || stop < start) invalid("range needs step > 0 and stop >= start");
    // Index-based so accumulated rounding cannot drop the endpoint.
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t comma = text.find(',', start);
      if (comma == std::string_view::npos) comma = text.size();
      out.push_back(parse_double(text.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  if (out.empty()) invalid("no sweep values");
  return out;
}

SimulationInput scenario_input(const ScenarioSpec& scenario, const RunConfig& config, std::uint64_t seed) {
  SimulationInput in = default_scenario(scenario.n_robots, scenario.pattern, scenario.power, seed);
  in.duration_us = scenario.duration_us;
  in.gt_period_us = config.step_us;
  in.gt_delay_us = config.gt_delay_us();
  in.contrast_scale = scenario.contrast_scale;
  if (scenario.noise_rate_hz_per_px) in.noise.rate_hz_per_px = *scenario.noise_rate_hz_per_px;
  for (RobotEntry& e : in.robots) e.path.pauses = scenario.pauses;
  return in;
}

CellRun run_cell_detailed(const ScenarioSpec& scenario, const RunConfig& config, std::uint64_t seed) {
  config.validate();
  CellRun run;
  run.input = scenario_input(scenario, config, seed);
  run.sim = simulate(run.input);

  PipelineOptions opts;
  opts.cover_until_us = scenario.duration_us;
  opts.keep_steps = true;
  PipelineResult pipe = run_pipeline(run.sim.events, config, opts);
  run.steps = std::move(pipe.steps);
  run.hypotheses = align_to_truth(run.sim.truth, to_hypotheses(pipe.rows));
  run.result.report = evaluate(run.sim.truth, run.hypotheses, config.match_config(config.t_a_us));

  const auto n = static_cast<std::size_t>(scenario.n_robots);
  const RobotSpec& robot = run.input.robots.front().robot;
  const double chassis = robot.width_px * robot.length_px;
  std::vector<std::size_t> full_counts;
  std::vector<std::size_t> partial_counts;
  double full_ratio = 0.0;
  double partial_ratio = 0.0;
  for (const StepResult& s : run.steps) {
    if (s.t_us < config.t_a_us || s.t_us > scenario.duration_us) continue;
    full_counts.push_back(s.full_clusters.size());
    partial_counts.push_back(s.pos_clusters.size() + s.neg_clusters.size());
    double a = 0.0;
    for (const ClusterSummary& c : s.full_clusters) a += static_cast<double>(c.bbox.area());
    full_ratio += a_ratio(a, static_cast<double>(n) * chassis);
    a = 0.0;
    for (const ClusterSummary& c : s.pos_clusters) a += static_cast<double>(c.bbox.area());
    for (const ClusterSummary& c : s.neg_clusters) a += static_cast<double>(c.bbox.area());
    partial_ratio += a_ratio(a, 2.0 * static_cast<double>(n) * chassis / 3.0);
  }
  if (!full_counts.empty()) {
    const auto frames = static_cast<double>(full_counts.size());
    run.result.full = {n_avg_clusters(full_counts, n), full_ratio / frames};
    run.result.partial = {n_avg_clusters(partial_counts, 2 * n), partial_ratio / frames};
  }
  return run;
}

CellResult run_cell(const ScenarioSpec& scenario, const RunConfig& config, std::uint64_t seed) {
  return run_cell_detailed(scenario, config, seed).result;
}

void SweepSpec::validate() const {
  if (values.empty()) invalid("sweep needs at least one value");
  if (repeats < 1) invalid("repeats must be >= 1");
  if (jobs < 1) invalid("jobs must be >= 1");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n_cells = spec.values.size() * static_cast<std::size_t>(spec.repeats);
  std::vector<std::vector<SweepRow>> per_cell(n_cells);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t cell = next++; cell < n_cells; cell = next++) {
      const double value = spec.values[cell / static_cast<std::size_t>(spec.repeats)];
      const int repeat = static_cast<int>(cell % static_cast<std::size_t>(spec.repeats));
      std::vector<SweepRow>& rows = per_cell[cell];
      try {
        RunConfig config = spec.base;
        ScenarioSpec scenario = spec.scenario;
        apply_param(spec.param, value, config, scenario);
        const CellResult r = run_cell(scenario, config, spec.seed_base + static_cast<std::uint64_t>(repeat));
        for (auto& [metric, v] : metrics_of(r)) rows.push_back({value, repeat, metric, v});
      } catch (const std::exception&) {
        rows.assign(1, SweepRow{value, repeat, "error", 1.0});
      }
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), n_cells);
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::vector<SweepRow> rows;
  for (auto& cell : per_cell) rows.insert(rows.end(), cell.begin(), cell.end());
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  std::string buf = "param_value,repeat,metric,value\n";
  for (const SweepRow& r : rows) {
    buf += format_double(r.param_value);
    buf.push_back(',');
    buf += std::to_string(r.repeat);
    buf.push_back(',');
    buf += r.metric;
    buf.push_back(',');
    buf += format_double(r.value);
    buf.push_back('\n');
  }
  out << buf;
}

}  // namespace evtrack
