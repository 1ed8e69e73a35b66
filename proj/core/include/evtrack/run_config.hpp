#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "evtrack/event.hpp"
#include "evtrack/metrics.hpp"
#include "evtrack/tracker.hpp"

namespace evtrack {

/// Which instant of an accumulation window a truth frame describes.
enum class GtAlign {
  Midpoint,  // t_end - t_a / 2
  Close,     // t_end
};

struct RunConfig {
  std::int64_t t_a_us = kDefaultAccumulationUs;
  std::int64_t step_us = kDefaultStepUs;
  double eps = 15.0;
  int min_pts_full = 225;
  int min_pts_partial = 45;
  double sigma_px = 30.0;
  double t_match_px = 30.0;
  double px_per_cm = 2.46;
  SensorGeometry geometry{};
  std::uint64_t seed = 1;
  GtAlign gt_align = GtAlign::Midpoint;

  void validate() const;
  TrackerConfig tracker_config() const;
  MatchConfig match_config(std::int64_t eval_start_us = 0) const;
  /// Delay the simulator applies to truth frames under gt_align.
  std::int64_t gt_delay_us() const noexcept;
};

/// Parses "WxH".
SensorGeometry parse_geometry(std::string_view text);

/// Applies flat `key = value` lines on top of `config`. Blank lines and lines
/// starting with '#' are skipped; unknown keys throw InvalidParameter.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::string& path);

/// Sets one key. Shared by the config file and command-line overrides.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

}  // namespace evtrack
