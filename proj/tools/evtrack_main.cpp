#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evtrack/error.hpp"
#include "evtrack/event.hpp"
#include "evtrack/homography.hpp"
#include "evtrack/io.hpp"
#include "evtrack/pipeline.hpp"
#include "evtrack/replay.hpp"
#include "evtrack/run_config.hpp"
#include "evtrack/simulator.hpp"
#include "evtrack/sweep.hpp"

namespace {

using namespace evtrack;

/// Flags shared by every subcommand. Tuning flags map one-to-one onto config
/// keys and win over the config file.
struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  /// Precedence: base < config file < flags.
  RunConfig resolve(RunConfig config = {}) const {
    if (!config_path.empty()) apply_config_file(config, config_path);
    for (const auto& [key, value] : overrides) set_config_value(config, key, value);
    config.validate();
    return config;
  }
};

void add_common(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config_path, "flat key = value file")->check(CLI::ExistingFile);
  struct Key {
    const char* flag;
    const char* key;
  };
  static constexpr Key kKeys[] = {
      {"--seed", "seed"},
      {"--geometry", "geometry"},
      {"--t-a-us", "t_a_us"},
      {"--step-us", "step_us"},
      {"--eps", "eps"},
      {"--min-pts-full", "min_pts_full"},
      {"--min-pts-partial", "min_pts_partial"},
      {"--sigma-px", "sigma_px"},
      {"--t-match-px", "t_match_px"},
      {"--px-per-cm", "px_per_cm"},
      {"--gt-align", "gt_align"},
  };
  for (const Key& k : kKeys) {
    app->add_option_function<std::string>(
        k.flag, [&flags, key = std::string(k.key)](const std::string& v) { flags.overrides[key] = v; },
        std::string("overrides config key ") + k.key);
  }
}

struct ScenarioFlags {
  int robots = 1;
  std::string pattern = "circle";
  std::string power = "full";
  double duration_s = 30.0;
  std::optional<double> noise_rate;
  double contrast_scale = 1.0;
  std::vector<std::string> pauses;

  ScenarioSpec spec() const {
    ScenarioSpec s;
    s.n_robots = robots;
    s.pattern = pattern == "square" ? PathPattern::Square : PathPattern::Circle;
    s.power = power == "half" ? MotorPower::Half : MotorPower::Full;
    s.duration_us = static_cast<std::int64_t>(duration_s * 1e6 + 0.5);
    s.noise_rate_hz_per_px = noise_rate;
    s.contrast_scale = contrast_scale;
    for (const std::string& p : pauses) {
      const std::size_t colon = p.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::InvalidParameter, "cli", "--pause expects START_S:END_S, got '" + p + "'");
      }
      try {
        const double a = std::stod(p.substr(0, colon));
        const double b = std::stod(p.substr(colon + 1));
        s.pauses.push_back({static_cast<std::int64_t>(a * 1e6 + 0.5), static_cast<std::int64_t>(b * 1e6 + 0.5)});
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidParameter, "cli", "--pause expects START_S:END_S, got '" + p + "'");
      }
    }
    return s;
  }
};

void add_scenario(CLI::App* app, ScenarioFlags& flags) {
  app->add_option("--robots", flags.robots, "robot count")->check(CLI::Range(1, 4));
  app->add_option("--pattern", flags.pattern)->check(CLI::IsMember({"circle", "square"}));
  app->add_option("--power", flags.power)->check(CLI::IsMember({"full", "half"}));
  app->add_option("--duration-s", flags.duration_s)->check(CLI::PositiveNumber);
  app->add_option("--noise-rate", flags.noise_rate, "background events per pixel per second");
  app->add_option("--contrast-scale", flags.contrast_scale);
  app->add_option("--pause", flags.pauses, "START_S:END_S stop for every robot (repeatable)");
}

/// Zero-byte files count as an empty stream; anything else must carry the
/// header.
std::vector<Event> load_events(const std::string& path, const SensorGeometry& geometry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cli", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) return {};
  return parse_event_stream(std::string_view(text), geometry);
}

/// Writes to `path`, or standard output when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file(path, text);
  }
}

int cmd_simulate(const CommonFlags& common, const ScenarioFlags& scen, const std::string& out_events,
                 const std::string& out_gt) {
  const RunConfig config = common.resolve();
  SimulationInput input = scenario_input(scen.spec(), config, config.seed);
  input.arena.geometry = config.geometry;
  const SimulationOutput sim = simulate(input);
  write_file(out_events, serialize_event_stream(sim.events));
  if (!out_gt.empty()) {
    std::ostringstream gt;
    write_truth_csv(gt, sim.truth);
    write_file(out_gt, gt.str());
  }
  std::cerr << "simulated " << sim.events.size() << " events, " << sim.truth.size() << " truth frames\n";
  return 0;
}

int cmd_track(const CommonFlags& common, const std::string& events_path, const std::string& out,
              bool stats) {
  const RunConfig config = common.resolve();
  const std::vector<Event> events = load_events(events_path, config.geometry);
  const PipelineResult result = run_pipeline(events, config);

  std::ostringstream csv;
  write_tracks_csv(csv, result.rows);
  emit(out, csv.str());

  // Summary and stats go to stderr whenever the CSV occupies stdout.
  std::ostream& log = (out.empty() || out == "-") ? std::cerr : std::cout;
  std::size_t n_ids = 0;
  {
    std::vector<TrackId> ids;
    for (const TrackRow& r : result.rows) ids.push_back(r.track_id);
    std::sort(ids.begin(), ids.end());
    n_ids = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }
  log << "windows=" << result.stats.size() << " events=" << events.size()
      << " detections=" << result.rows.size() << " tracks=" << n_ids << "\n";
  if (stats) {
    log << "t_us,n_events,latency_ms\n";
    for (const WindowStat& s : result.stats) {
      log << s.t_us << "," << s.n_events << "," << format_double(s.latency_ms) << "\n";
    }
    const LatencySummary lat = summarize_latency(result.stats);
    char line[128];
    std::snprintf(line, sizeof(line), "latency_ms p50=%.3f p95=%.3f max=%.3f\n", lat.p50_ms, lat.p95_ms,
                  lat.max_ms);
    log << line;
  }
  return 0;
}

struct EvaluateFlags {
  std::string tracks;
  std::string gt;
  std::optional<double> match_dist_px;
  std::string homography;
  std::optional<std::int64_t> warmup_us;
  std::string out;
};

int cmd_evaluate(const CommonFlags& common, const EvaluateFlags& f) {
  RunConfig config = common.resolve();
  if (f.match_dist_px) config.t_match_px = *f.match_dist_px;
  config.validate();

  std::vector<FrameTruth> truth = read_truth_file(f.gt);
  if (!f.homography.empty()) {
    const auto [src, dst] = read_correspondences_file(f.homography);
    const Homography H = solve_homography(src, dst);
    for (FrameTruth& frame : truth) {
      for (TruthObject& o : frame.objects) o.position = apply(H, o.position);
    }
  }
  const std::vector<TrackRow> rows = read_tracks_file(f.tracks);
  const std::vector<FrameHypothesis> hyp = align_to_truth(truth, to_hypotheses(rows));
  const EvalReport report = evaluate(truth, hyp, config.match_config(f.warmup_us.value_or(config.t_a_us)));
  emit(f.out, report_json(report));
  return 0;
}

struct SweepFlags {
  std::string param;
  std::string values;
  int repeats = 3;
  int jobs = 1;
  std::string out;
};

int cmd_sweep(const CommonFlags& common, const ScenarioFlags& scen, const SweepFlags& f) {
  SweepSpec spec;
  spec.scenario = scen.spec();
  RunConfig base;
  base.min_pts_partial = recommended_min_pts_partial(spec.scenario.power);
  spec.base = common.resolve(base);
  spec.param = parse_sweep_param(f.param);
  spec.values = parse_sweep_values(f.values);
  spec.repeats = f.repeats;
  spec.jobs = f.jobs;
  spec.seed_base = spec.base.seed;
  std::ostringstream csv;
  write_sweep_csv(csv, run_sweep(spec));
  emit(f.out, csv.str());
  return 0;
}

int cmd_replay(const CommonFlags& common, const std::string& events_path, const std::string& tracks_path,
               const std::string& out_dir) {
  const RunConfig config = common.resolve();
  const std::vector<Event> events = load_events(events_path, config.geometry);
  const std::vector<TrackRow> tracks = read_tracks_file(tracks_path);
  const std::size_t n = replay(events, tracks, config, out_dir);
  std::cerr << "wrote " << n << " frames to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-camera multi-robot tracking: simulate, track, evaluate, sweep, replay"};
  app.require_subcommand(1);

  CommonFlags common;
  ScenarioFlags scen;

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic event stream and ground truth");
  add_common(simulate_cmd, common);
  add_scenario(simulate_cmd, scen);
  std::string out_events;
  std::string out_gt;
  simulate_cmd->add_option("--out-events", out_events)->required();
  simulate_cmd->add_option("--out-gt", out_gt);

  auto* track_cmd = app.add_subcommand("track", "cluster and track an event CSV");
  add_common(track_cmd, common);
  std::string events_path;
  std::string track_out;
  bool stats = false;
  track_cmd->add_option("--events", events_path)->required();
  track_cmd->add_option("--out", track_out, "tracks CSV (default stdout)");
  track_cmd->add_flag("--stats", stats, "per-window event counts and latency percentiles");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a tracks CSV against ground truth");
  add_common(evaluate_cmd, common);
  EvaluateFlags eval;
  evaluate_cmd->add_option("--tracks", eval.tracks)->required();
  evaluate_cmd->add_option("--gt", eval.gt)->required();
  evaluate_cmd->add_option("--match-dist-px", eval.match_dist_px);
  evaluate_cmd->add_option("--homography", eval.homography, "correspondences file mapping truth coordinates");
  evaluate_cmd->add_option("--warmup-us", eval.warmup_us, "skip frames before this time (default t_a)");
  evaluate_cmd->add_option("--out", eval.out, "metrics JSON (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep to long-format CSV");
  add_common(sweep_cmd, common);
  add_scenario(sweep_cmd, scen);
  SweepFlags sweep;
  sweep_cmd->add_option("--param", sweep.param)->required();
  sweep_cmd->add_option("--values", sweep.values, "a,b,c or start:stop:step")->required();
  sweep_cmd->add_option("--repeats", sweep.repeats);
  sweep_cmd->add_option("--jobs", sweep.jobs);
  sweep_cmd->add_option("--out", sweep.out, "CSV (default stdout)");

  auto* replay_cmd = app.add_subcommand("replay", "render annotated PPM frames");
  add_common(replay_cmd, common);
  std::string replay_events;
  std::string replay_tracks;
  std::string replay_dir;
  replay_cmd->add_option("--events", replay_events)->required();
  replay_cmd->add_option("--tracks", replay_tracks)->required();
  replay_cmd->add_option("--out-dir", replay_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) return cmd_simulate(common, scen, out_events, out_gt);
    if (*track_cmd) return cmd_track(common, events_path, track_out, stats);
    if (*evaluate_cmd) return cmd_evaluate(common, eval);
    if (*sweep_cmd) return cmd_sweep(common, scen, sweep);
    if (*replay_cmd) return cmd_replay(common, replay_events, replay_tracks, replay_dir);
  } catch (const Error& e) {
    std::cerr << "evtrack: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "evtrack: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
