#include "evtrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <tuple>

#include "evtrack/error.hpp"
#include "evtrack/rng.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "simulator";

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidParameter, kModule, what);
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Wall time minus paused time, in seconds.
double path_clock_s(const PathSpec& path, std::int64_t t_us) {
  std::int64_t paused = 0;
  for (const Pause& p : path.pauses) {
    const std::int64_t a = std::max<std::int64_t>(p.start_us, 0);
    const std::int64_t b = std::min(p.end_us, t_us);
    if (b > a) paused += b - a;
  }
  return static_cast<double>(t_us - paused) * 1e-6;
}

struct Extent {
  double min_x, min_y, max_x, max_y;
};

Extent path_extent(const PathSpec& path) {
  if (const auto* c = std::get_if<CirclePath>(&path.shape)) {
    return {c->center.x - c->radius_px, c->center.y - c->radius_px, c->center.x + c->radius_px,
            c->center.y + c->radius_px};
  }
  if (const auto* s = std::get_if<SquarePath>(&path.shape)) {
    return {s->corner.x, s->corner.y, s->corner.x + s->side_px, s->corner.y + s->side_px};
  }
  const auto& st = std::get<StationaryPath>(path.shape);
  return {st.position.x, st.position.y, st.position.x, st.position.y};
}

struct PendingEvent {
  std::int64_t t_us;
  std::size_t rank;  // robot order, noise last
  std::uint64_t seq;
  Event event;
};

}  // namespace

void ArenaConfig::validate() const {
  geometry.validate();
  if (!(px_per_cm > 0.0) || !std::isfinite(px_per_cm)) invalid("px_per_cm must be positive");
  if (mat_rect.min_x > mat_rect.max_x || mat_rect.min_y > mat_rect.max_y) invalid("empty mat_rect");
  if (!geometry.contains(mat_rect.min_x, mat_rect.min_y) ||
      !geometry.contains(mat_rect.max_x, mat_rect.max_y)) {
    invalid("mat_rect must lie within the sensor");
  }
}

void SimulationInput::validate() const {
  arena.validate();
  std::set<RobotId> ids;
  for (const RobotEntry& e : robots) {
    const RobotSpec& r = e.robot;
    if (!ids.insert(r.robot_id).second) invalid("duplicate robot id " + std::to_string(r.robot_id));
    if (!(r.width_px >= 4.0) || !(r.length_px >= 4.0)) invalid("robot sides must be >= 4 px");
    if (!(r.contrast > 0.0 && r.contrast <= 1.0)) invalid("contrast must be in (0, 1]");
    const PathSpec& p = e.path;
    if (!std::holds_alternative<StationaryPath>(p.shape) && !(p.speed_mps > 0.0)) {
      invalid("speed_mps must be positive");
    }
    if (!(p.turn_rate_dps > 0.0)) invalid("turn_rate_dps must be positive");
    if (!(p.phase >= 0.0 && p.phase < 1.0)) invalid("phase must be in [0, 1)");
    if (const auto* c = std::get_if<CirclePath>(&p.shape); c && !(c->radius_px > 0.0)) {
      invalid("circle radius must be positive");
    }
    if (const auto* s = std::get_if<SquarePath>(&p.shape); s && !(s->side_px > 0.0)) {
      invalid("square side must be positive");
    }
    for (const Pause& pause : p.pauses) {
      if (pause.start_us < 0 || pause.end_us <= pause.start_us) invalid("bad pause interval");
    }
  }
  if (!(noise.rate_hz_per_px >= 0.0) || !std::isfinite(noise.rate_hz_per_px)) {
    invalid("noise rate must be >= 0");
  }
  if (duration_us < 0) invalid("duration_us must be >= 0");
  if (gt_period_us <= 0) invalid("gt_period_us must be positive");
  if (gt_delay_us < 0) invalid("gt_delay_us must be >= 0");
  if (events_per_transition < 1) invalid("events_per_transition must be >= 1");
  if (!(contrast_scale >= 0.0 && contrast_scale <= 1.0)) invalid("contrast_scale must be in [0, 1]");
  if (micro_step_us <= 0) invalid("micro_step_us must be positive");
}

Pose pose_at(const PathSpec& path, double px_per_cm, std::int64_t t_us) {
  const double tau = path_clock_s(path, t_us);
  const double v = path.speed_mps * 100.0 * px_per_cm;  // px/s

  if (const auto* c = std::get_if<CirclePath>(&path.shape)) {
    const double alpha = 2.0 * std::numbers::pi * path.phase + v / c->radius_px * tau;
    return {{c->center.x + c->radius_px * std::cos(alpha), c->center.y + c->radius_px * std::sin(alpha)},
            wrap_degrees(rad2deg(alpha) + 90.0)};
  }
  if (const auto* s = std::get_if<SquarePath>(&path.shape)) {
    const double edge_s = s->side_px / v;
    const double turn_s = 90.0 / path.turn_rate_dps;
    const double leg = edge_s + turn_s;
    const double cycle = 4.0 * leg;
    double u = std::fmod(path.phase * cycle + tau, cycle);
    if (u < 0.0) u += cycle;
    const int k = std::min(3, static_cast<int>(u / leg));
    const double local = u - k * leg;
    static constexpr double kCornerX[4] = {0.0, 1.0, 1.0, 0.0};
    static constexpr double kCornerY[4] = {0.0, 0.0, 1.0, 1.0};
    static constexpr double kDirX[4] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double kDirY[4] = {0.0, 1.0, 0.0, -1.0};
    if (local < edge_s) {
      const double d = v * local;
      return {{s->corner.x + kCornerX[k] * s->side_px + kDirX[k] * d,
               s->corner.y + kCornerY[k] * s->side_px + kDirY[k] * d},
              wrap_degrees(90.0 * k)};
    }
    const int n = (k + 1) % 4;
    return {{s->corner.x + kCornerX[n] * s->side_px, s->corner.y + kCornerY[n] * s->side_px},
            wrap_degrees(90.0 * k + path.turn_rate_dps * (local - edge_s))};
  }
  const auto& st = std::get<StationaryPath>(path.shape);
  return {st.position, wrap_degrees(st.heading_deg)};
}

namespace {

/// Covered pixels of one footprint as one column interval per row; the
/// footprint is convex, so each row is a single run. Empty rows have x0 > x1.
struct RowSpans {
  std::int32_t y0 = 0;
  std::vector<std::pair<std::int32_t, std::int32_t>> runs;

  friend bool operator==(const RowSpans&, const RowSpans&) = default;
};

RowSpans row_spans(const RobotSpec& robot, const Pose& pose, const SensorGeometry& geometry) {
  const double th = deg2rad(pose.heading_deg);
  const double ux = std::cos(th);
  const double uy = std::sin(th);
  const double half_l = robot.length_px / 2.0;
  const double half_w = robot.width_px / 2.0;
  const double reach = std::hypot(half_l, half_w);
  const auto x0 = static_cast<std::int32_t>(std::max(0.0, std::ceil(pose.center.x - reach)));
  const auto y0 = static_cast<std::int32_t>(std::max(0.0, std::ceil(pose.center.y - reach)));
  const auto x1 = static_cast<std::int32_t>(
      std::min<double>(geometry.width_px - 1, std::floor(pose.center.x + reach)));
  const auto y1 = static_cast<std::int32_t>(
      std::min<double>(geometry.height_px - 1, std::floor(pose.center.y + reach)));

  // Pixel-center-inside test; the run bounds below are only a starting guess
  // that this test then settles exactly.
  auto inside = [&](std::int32_t x, std::int32_t y) {
    const double dx = x - pose.center.x;
    const double dy = y - pose.center.y;
    const double along = dx * ux + dy * uy;
    const double across = -dx * uy + dy * ux;
    return std::abs(along) <= half_l && std::abs(across) <= half_w;
  };

  RowSpans spans;
  spans.y0 = y0;
  for (std::int32_t y = y0; y <= y1; ++y) {
    // Intersect |along| <= half_l and |across| <= half_w as bounds on dx.
    const double dy = y - pose.center.y;
    double lo = -reach - 1.0;
    double hi = reach + 1.0;
    auto clip = [&](double coef, double offset, double limit) {
      // |coef * dx + offset| <= limit
      if (std::abs(coef) < 1e-12) {
        if (std::abs(offset) > limit) hi = lo - 1.0;
        return;
      }
      double a = (-limit - offset) / coef;
      double b = (limit - offset) / coef;
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    };
    clip(ux, dy * uy, half_l);
    clip(-uy, dy * ux, half_w);
    std::int32_t a = x1 + 1;
    std::int32_t b = x1;
    if (lo <= hi) {
      a = std::clamp(static_cast<std::int32_t>(std::ceil(pose.center.x + lo)), x0, x1 + 1);
      b = std::clamp(static_cast<std::int32_t>(std::floor(pose.center.x + hi)), x0 - 1, x1);
    }
    if (a > b) {
      // Rounding may have emptied a row that still holds a pixel center.
      const auto mid = std::clamp(static_cast<std::int32_t>(std::lround(pose.center.x + (lo + hi) / 2.0)), x0, x1);
      if (lo <= hi + 1.0 && inside(mid, y)) {
        a = mid;
        b = mid;
      }
    }
    if (a <= b) {
      while (a > x0 && inside(a - 1, y)) --a;
      while (a <= b && !inside(a, y)) ++a;
      while (b < x1 && inside(b + 1, y)) ++b;
      while (b >= a && !inside(b, y)) --b;
    }
    spans.runs.emplace_back(a, b);
  }
  return spans;
}

/// Appends pixels of `a` missing from `b`, row-major.
void span_difference(const RowSpans& a, const RowSpans& b, std::int32_t width,
                     std::vector<std::int32_t>& out) {
  for (std::size_t r = 0; r < a.runs.size(); ++r) {
    const std::int32_t y = a.y0 + static_cast<std::int32_t>(r);
    auto [ax, bx] = a.runs[r];
    std::int32_t cx = 1;
    std::int32_t dx = 0;
    const std::int64_t rb = static_cast<std::int64_t>(y) - b.y0;
    if (rb >= 0 && rb < static_cast<std::int64_t>(b.runs.size())) {
      std::tie(cx, dx) = b.runs[static_cast<std::size_t>(rb)];
    }
    for (std::int32_t x = ax; x <= bx; ++x) {
      if (cx <= dx && x >= cx && x <= dx) {
        x = dx;
        continue;
      }
      out.push_back(y * width + x);
    }
  }
}

std::vector<std::int32_t> flatten(const RowSpans& spans, std::int32_t width) {
  std::vector<std::int32_t> out;
  span_difference(spans, RowSpans{}, width, out);
  return out;
}

}  // namespace

std::vector<std::int32_t> rasterize(const RobotSpec& robot, const Pose& pose,
                                    const SensorGeometry& geometry) {
  return flatten(row_spans(robot, pose, geometry), geometry.width_px);
}

SimulationOutput simulate(const SimulationInput& input) {
  input.validate();
  const ArenaConfig& arena = input.arena;
  const SensorGeometry& geo = arena.geometry;
  const std::size_t n_robots = input.robots.size();

  for (const RobotEntry& e : input.robots) {
    const double hd = std::hypot(e.robot.width_px, e.robot.length_px) / 2.0;
    const Extent ex = path_extent(e.path);
    if (ex.min_x - hd < arena.mat_rect.min_x || ex.min_y - hd < arena.mat_rect.min_y ||
        ex.max_x + hd > arena.mat_rect.max_x || ex.max_y + hd > arena.mat_rect.max_y) {
      throw Error(ErrorCode::PathOutOfBounds, kModule,
                  "robot " + std::to_string(e.robot.robot_id) + " leaves the mat");
    }
  }

  std::vector<RowSpans> covered(n_robots);
  for (std::size_t i = 0; i < n_robots; ++i) {
    const RobotEntry& e = input.robots[i];
    covered[i] = row_spans(e.robot, pose_at(e.path, arena.px_per_cm, 0), geo);
  }
  for (std::size_t i = 0; i < n_robots; ++i) {
    for (std::size_t j = i + 1; j < n_robots; ++j) {
      const std::vector<std::int32_t> pi = flatten(covered[i], geo.width_px);
      const std::vector<std::int32_t> pj = flatten(covered[j], geo.width_px);
      std::vector<std::int32_t> common;
      std::set_intersection(pi.begin(), pi.end(), pj.begin(), pj.end(), std::back_inserter(common));
      if (!common.empty()) {
        throw Error(ErrorCode::OverlapAtStart, kModule,
                    "robots " + std::to_string(input.robots[i].robot.robot_id) + " and " +
                        std::to_string(input.robots[j].robot.robot_id) + " overlap at t=0");
      }
    }
  }

  SimulationOutput out;
  Rng rng(input.noise.seed);
  const std::int64_t mat_w = arena.mat_rect.max_x - arena.mat_rect.min_x + 1;
  const std::int64_t mat_h = arena.mat_rect.max_y - arena.mat_rect.min_y + 1;
  const double mat_area = static_cast<double>(mat_w * mat_h);
  const int k_events = input.events_per_transition;

  std::vector<PendingEvent> pending;
  std::vector<std::int32_t> gained;
  std::vector<std::int32_t> lost;
  for (std::int64_t t0 = 0; t0 < input.duration_us; t0 += input.micro_step_us) {
    const std::int64_t t1 = std::min(t0 + input.micro_step_us, input.duration_us);
    const auto span = static_cast<std::uint64_t>(t1 - t0);
    pending.clear();
    std::uint64_t seq = 0;
    auto emit = [&](std::size_t rank, std::int32_t pixel, Polarity pol) {
      const std::int64_t t = t0 + 1 + static_cast<std::int64_t>(rng.uniform_int(span));
      const auto x = static_cast<std::uint16_t>(pixel % geo.width_px);
      const auto y = static_cast<std::uint16_t>(pixel / geo.width_px);
      pending.push_back({t, rank, seq++, Event{t, x, y, pol}});
    };

    for (std::size_t i = 0; i < n_robots; ++i) {
      const RobotEntry& e = input.robots[i];
      RowSpans now = row_spans(e.robot, pose_at(e.path, arena.px_per_cm, t1), geo);
      if (now == covered[i]) continue;
      gained.clear();
      lost.clear();
      span_difference(now, covered[i], geo.width_px, gained);
      span_difference(covered[i], now, geo.width_px, lost);
      const double p = e.robot.contrast * input.contrast_scale;
      // Dark body arriving darkens the pixel; leaving brightens it.
      for (std::int32_t px : gained) {
        for (int k = 0; k < k_events; ++k) {
          if (rng.bernoulli(p)) emit(i, px, Polarity::Negative);
        }
      }
      for (std::int32_t px : lost) {
        for (int k = 0; k < k_events; ++k) {
          if (rng.bernoulli(p)) emit(i, px, Polarity::Positive);
        }
      }
      covered[i] = std::move(now);
    }

    if (input.noise.rate_hz_per_px > 0.0) {
      const double mean = input.noise.rate_hz_per_px * mat_area * static_cast<double>(span) * 1e-6;
      const std::uint64_t count = rng.poisson(mean);
      for (std::uint64_t c = 0; c < count; ++c) {
        const auto x = static_cast<std::int32_t>(arena.mat_rect.min_x +
                                                 static_cast<std::int64_t>(rng.uniform_int(mat_w)));
        const auto y = static_cast<std::int32_t>(arena.mat_rect.min_y +
                                                 static_cast<std::int64_t>(rng.uniform_int(mat_h)));
        const Polarity pol = rng.uniform_int(2) == 1 ? Polarity::Positive : Polarity::Negative;
        emit(n_robots, y * geo.width_px + x, pol);
      }
    }

    std::sort(pending.begin(), pending.end(), [](const PendingEvent& a, const PendingEvent& b) {
      return std::tie(a.t_us, a.rank, a.seq) < std::tie(b.t_us, b.rank, b.seq);
    });
    for (const PendingEvent& pe : pending) out.events.push_back(pe.event);
  }

  const std::int64_t n_frames = (input.duration_us + input.gt_period_us - 1) / input.gt_period_us;
  out.truth.reserve(static_cast<std::size_t>(n_frames));
  for (std::int64_t k = 1; k <= n_frames; ++k) {
    FrameTruth frame;
    frame.t_us = k * input.gt_period_us;
    const std::int64_t at = std::max<std::int64_t>(0, frame.t_us - input.gt_delay_us);
    for (const RobotEntry& e : input.robots) {
      const Pose pose = pose_at(e.path, arena.px_per_cm, at);
      frame.objects.push_back({e.robot.robot_id, pose.center, pose.heading_deg});
    }
    out.truth.push_back(std::move(frame));
  }
  return out;
}

SimulationInput default_scenario(int n_robots, PathPattern pattern, MotorPower power,
                                 std::uint64_t seed) {
  if (n_robots < 1 || n_robots > 4) invalid("n_robots must be in 1..4");
  // Ring spacing keeps the clusters of neighboring robots apart; four robots
  // only fit at a tighter pitch.
  const double pitch = n_robots <= 3 ? 65.0 : 62.0;
  static constexpr double kContrast[4] = {1.0, 0.9, 0.8, 0.7};

  SimulationInput in;
  in.noise = {0.5, seed};
  in.gt_delay_us = kDefaultAccumulationUs / 2;
  const Point2 center{
      (in.arena.mat_rect.min_x + in.arena.mat_rect.max_x) / 2.0,
      (in.arena.mat_rect.min_y + in.arena.mat_rect.max_y) / 2.0,
  };
  for (int i = 0; i < n_robots; ++i) {
    RobotEntry e;
    e.robot.robot_id = static_cast<RobotId>(i + 1);
    e.robot.contrast = kContrast[i];
    e.path.speed_mps = power == MotorPower::Full ? 0.46 : 0.23;
    e.path.turn_rate_dps = power == MotorPower::Full ? 527.0 : 264.0;
    e.path.phase = 0.25 * i;
    const double r = 205.0 - pitch * i;
    if (pattern == PathPattern::Circle) {
      e.path.shape = CirclePath{center, r};
    } else {
      e.path.shape = SquarePath{{center.x - r, center.y - r}, 2.0 * r};
    }
    in.robots.push_back(std::move(e));
  }
  return in;
}

int recommended_min_pts_partial(MotorPower power) noexcept {
  return power == MotorPower::Full ? 45 : 35;
}

}  // namespace evtrack
