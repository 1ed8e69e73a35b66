#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evtrack/geometry.hpp"
#include "evtrack/kdtree.hpp"

namespace evtrack {

using RobotId = std::uint32_t;

struct TruthObject {
  RobotId gt_id = 0;
  Point2 position;
  double theta_deg = 0.0;
};

struct FrameTruth {
  std::int64_t t_us = 0;
  std::vector<TruthObject> objects;
};

struct HypothesisObject {
  TrackId track_id = 0;
  Point2 position;
  std::optional<double> theta_deg;
};

struct FrameHypothesis {
  std::int64_t t_us = 0;
  std::vector<HypothesisObject> objects;
};

struct MatchConfig {
  double t_match_px = 30.0;
  double px_per_cm = 2.46;
  /// evaluate() ignores frames before this time (tracker warm-up).
  std::int64_t eval_start_us = 0;

  void validate() const;
};

struct MatchedPair {
  RobotId gt_id = 0;
  TrackId track_id = 0;
  Point2 truth;
  Point2 hypothesis;
  double truth_theta_deg = 0.0;
  std::optional<double> hypothesis_theta_deg;
  double distance_px = 0.0;
};

struct FrameMatch {
  std::int64_t t_us = 0;
  std::vector<MatchedPair> pairs;
  std::size_t gt_count = 0;
  std::size_t misses = 0;
  std::size_t false_positives = 0;
  std::size_t mismatches = 0;
};

struct DetectionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

struct EvalReport {
  double precision = 1.0;
  double recall = 1.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::optional<double> mae_distance_cm;  // empty without matches
  std::optional<double> mae_theta_deg;    // empty without headed matches
  std::optional<double> mota;             // empty without ground truth
  std::size_t misses = 0;
  std::size_t false_positives = 0;
  std::size_t mismatches = 0;
  std::size_t gt_total = 0;
  std::size_t n_frames = 0;
};

struct ClusterQualityReport {
  double n_avg_clusters = 0.0;
  double a_ratio = 0.0;
};

/// CLEAR MOT correspondence. Frames are paired by position and must carry
/// equal timestamps (FrameAlignmentError otherwise). Per frame: pairs from the
/// previous frame that are still within t_match_px are kept; the rest are
/// matched greedily by ascending distance, ties by (gt_id, track_id). A truth
/// object matched to a track other than the one it was last matched to counts
/// one mismatch.
std::vector<FrameMatch> correspond(std::span<const FrameTruth> truth,
                                   std::span<const FrameHypothesis> hyp,
                                   const MatchConfig& cfg);

DetectionCounts totals(std::span<const FrameMatch> frames);

/// A zero denominator yields 1.0.
PrecisionRecall precision_recall(const DetectionCounts& counts);

/// Mean Euclidean pair distance in cm. Throws NoMatches.
double mae_distance(std::span<const FrameMatch> frames, double px_per_cm);

/// Mean wrapped heading error over pairs where the hypothesis has a heading.
/// Throws NoHeadings.
double mae_theta(std::span<const FrameMatch> frames);

/// 1 - (misses + false positives + mismatches) / ground-truth objects.
/// Throws NoGroundTruth.
double mota(std::span<const FrameMatch> frames);

/// Mean over frames of clusters / n_robots.
double n_avg_clusters(std::span<const std::size_t> clusters_per_frame, std::size_t n_robots);

/// Detected bounding-box area over the true area.
double a_ratio(double bbox_area_px2, double actual_area_px2);

/// Hypothesis frames re-keyed onto the truth timeline: a truth timestamp with
/// no hypothesis frame gets an empty one, and hypothesis frames after the last
/// truth frame are dropped. Any other unpaired hypothesis timestamp throws
/// FrameAlignmentError.
std::vector<FrameHypothesis> align_to_truth(std::span<const FrameTruth> truth,
                                            std::span<const FrameHypothesis> hyp);

/// correspond() plus every summary metric, over frames at or after
/// cfg.eval_start_us.
EvalReport evaluate(std::span<const FrameTruth> truth, std::span<const FrameHypothesis> hyp,
                    const MatchConfig& cfg);

}  // namespace evtrack
