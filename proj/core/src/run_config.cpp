#include "evtrack/run_config.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidParameter, kModule, what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    invalid("bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void RunConfig::validate() const {
  if (t_a_us <= 0) invalid("t_a_us must be positive");
  if (step_us <= 0) invalid("step_us must be positive");
  tracker_config().validate();
  match_config().validate();
}

TrackerConfig RunConfig::tracker_config() const {
  TrackerConfig c;
  c.sigma_px = sigma_px;
  c.params_full = {eps, min_pts_full};
  c.params_partial = {eps, min_pts_partial};
  c.geometry = geometry;
  return c;
}

MatchConfig RunConfig::match_config(std::int64_t eval_start_us) const {
  return {t_match_px, px_per_cm, eval_start_us};
}

std::int64_t RunConfig::gt_delay_us() const noexcept {
  return gt_align == GtAlign::Midpoint ? t_a_us / 2 : 0;
}

SensorGeometry parse_geometry(std::string_view text) {
  const std::size_t x = text.find_first_of("xX");
  if (x == std::string_view::npos) invalid("geometry must be WxH, got '" + std::string(text) + "'");
  SensorGeometry g{parse_value<std::int32_t>("geometry", trim(text.substr(0, x))),
                   parse_value<std::int32_t>("geometry", trim(text.substr(x + 1)))};
  g.validate();
  return g;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "t_a_us") {
    c.t_a_us = parse_value<std::int64_t>(key, value);
  } else if (key == "step_us") {
    c.step_us = parse_value<std::int64_t>(key, value);
  } else if (key == "eps") {
    c.eps = parse_value<double>(key, value);
  } else if (key == "min_pts_full") {
    c.min_pts_full = parse_value<int>(key, value);
  } else if (key == "min_pts_partial") {
    c.min_pts_partial = parse_value<int>(key, value);
  } else if (key == "sigma_px") {
    c.sigma_px = parse_value<double>(key, value);
  } else if (key == "t_match_px") {
    c.t_match_px = parse_value<double>(key, value);
  } else if (key == "px_per_cm") {
    c.px_per_cm = parse_value<double>(key, value);
  } else if (key == "geometry") {
    c.geometry = parse_geometry(value);
  } else if (key == "seed") {
    c.seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "gt_align") {
    if (value == "midpoint") {
      c.gt_align = GtAlign::Midpoint;
    } else if (value == "close") {
      c.gt_align = GtAlign::Close;
    } else {
      invalid("gt_align must be 'midpoint' or 'close'");
    }
  } else {
    invalid("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      invalid("config line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, kModule, "cannot open " + path);
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  apply_config_text(config, text);
}

}  // namespace evtrack
