#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "evtrack/event.hpp"
#include "evtrack/geometry.hpp"
#include "evtrack/metrics.hpp"

namespace evtrack {

struct ArenaConfig {
  SensorGeometry geometry{};
  /// Image footprint of the 183 cm mat: 450 px at 2.46 px/cm, centered.
  PixelRect mat_rect{95, 15, 545, 465};
  double px_per_cm = 2.46;

  void validate() const;
};

struct RobotSpec {
  RobotId robot_id = 1;
  double width_px = 24.0;   // across the heading
  double length_px = 24.0;  // along the heading
  /// Per-transition emission probability, (0, 1]. Lighter shells emit less.
  double contrast = 1.0;
};

/// Starts at angle 2*pi*phase from +x and moves with increasing angle.
struct CirclePath {
  Point2 center;
  double radius_px = 100.0;
};

/// `corner` is the top-left corner (smallest x and y). Edges are driven +x,
/// +y, -x, -y, with an in-place 90 degree turn at every corner.
struct SquarePath {
  Point2 corner;
  double side_px = 200.0;
};

struct StationaryPath {
  Point2 position;
  double heading_deg = 0.0;
};

/// The path clock stops during [start_us, end_us).
struct Pause {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
};

struct PathSpec {
  std::variant<CirclePath, SquarePath, StationaryPath> shape = CirclePath{};
  double speed_mps = 0.46;
  /// Zero-point turn rate at square corners.
  double turn_rate_dps = 90.0;
  /// Start offset as a fraction of one lap, [0, 1).
  double phase = 0.0;
  std::vector<Pause> pauses;
};

struct NoiseModel {
  double rate_hz_per_px = 0.0;
  std::uint64_t seed = 0;
};

struct RobotEntry {
  RobotSpec robot;
  PathSpec path;
};

struct Pose {
  Point2 center;
  double heading_deg = 0.0;  // [-180, 180)
};

struct SimulationInput {
  ArenaConfig arena{};
  std::vector<RobotEntry> robots;
  NoiseModel noise{};
  std::int64_t duration_us = 30'000'000;
  std::int64_t gt_period_us = kDefaultStepUs;
  /// Truth frame t carries the pose at t - gt_delay_us (clamped at 0). Half the
  /// accumulation time aligns truth with the middle of the tracker's window.
  std::int64_t gt_delay_us = 0;
  /// Threshold crossings per covered or uncovered pixel. A dark shell on a
  /// white mat is a large log-contrast step, so one edge crossing fires the
  /// pixel several times.
  int events_per_transition = 3;
  /// Global multiplier on every robot's contrast (lighting analog).
  double contrast_scale = 1.0;
  std::int64_t micro_step_us = 1000;

  void validate() const;
};

struct SimulationOutput {
  std::vector<Event> events;
  std::vector<FrameTruth> truth;
};

/// Pose along the path after `t_us` of wall time (pauses excluded).
Pose pose_at(const PathSpec& path, double px_per_cm, std::int64_t t_us);

/// Pixels whose centers lie inside the rotated footprint, as y * width + x,
/// ascending. Pixels outside the sensor are dropped.
std::vector<std::int32_t> rasterize(const RobotSpec& robot, const Pose& pose,
                                    const SensorGeometry& geometry);

/// Deterministic for a given input. Throws OverlapAtStart, PathOutOfBounds,
/// InvalidParameter.
SimulationOutput simulate(const SimulationInput& input);

enum class PathPattern { Circle, Square };
enum class MotorPower { Full, Half };

/// Robots on concentric circles or nested squares around the mat center,
/// contrasts 1.0, 0.9, 0.8, 0.7, noise 0.5 Hz per mat pixel, 30 s.
SimulationInput default_scenario(int n_robots, PathPattern pattern, MotorPower power,
                                 std::uint64_t seed);

/// minPts for polarity clusters that works at each motor power.
int recommended_min_pts_partial(MotorPower power) noexcept;

}  // namespace evtrack
