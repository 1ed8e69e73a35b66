#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evtrack/homography.hpp"
#include "evtrack/metrics.hpp"
#include "evtrack/tracker.hpp"

namespace evtrack {

/// One row of the tracks CSV: a detection, i.e. a full cluster matched to or
/// creating a track in one window.
struct TrackRow {
  std::int64_t t_us = 0;
  TrackId track_id = 0;
  Point2 position;
  std::optional<double> theta_deg;
  std::size_t cluster_size = 0;

  friend bool operator==(const TrackRow&, const TrackRow&) = default;
};

inline constexpr const char* kTracksHeader = "t_us,track_id,x_px,y_px,theta_deg,cluster_size";
inline constexpr const char* kTruthHeader = "t_us,robot_id,x_px,y_px,theta_deg";

/// One row per detection of `result`, by track id.
std::vector<TrackRow> track_rows(const StepResult& result);

void write_tracks_csv(std::ostream& out, std::span<const TrackRow> rows);
std::vector<TrackRow> read_tracks_csv(std::istream& in);
std::vector<TrackRow> read_tracks_file(const std::string& path);

/// Groups consecutive rows with equal timestamps into frames.
std::vector<FrameHypothesis> to_hypotheses(std::span<const TrackRow> rows);

void write_truth_csv(std::ostream& out, std::span<const FrameTruth> frames);
std::vector<FrameTruth> read_truth_csv(std::istream& in);
std::vector<FrameTruth> read_truth_file(const std::string& path);

/// Metrics JSON. Undefined values (no matches, no headings) are null.
std::string report_json(const EvalReport& report);

/// Eight `x,y` lines: four source points, then four destination points.
std::pair<Quad, Quad> read_correspondences(std::istream& in);
std::pair<Quad, Quad> read_correspondences_file(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Throws IoError when the file cannot be opened.
void write_file(const std::string& path, const std::string& contents);

}  // namespace evtrack
