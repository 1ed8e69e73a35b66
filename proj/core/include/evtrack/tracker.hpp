#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "evtrack/dbscan.hpp"
#include "evtrack/event.hpp"
#include "evtrack/geometry.hpp"
#include "evtrack/kdtree.hpp"

namespace evtrack {

struct TrackerConfig {
  /// New-robot threshold: roughly the chassis width in pixels.
  double sigma_px = 30.0;
  DbscanParams params_full{15.0, 225};
  DbscanParams params_partial{15.0, 45};
  SensorGeometry geometry{};
  /// Tracks unseen for longer than this are purged. Disabled by default:
  /// identities survive robots that stop moving.
  std::optional<std::int64_t> max_age_us;

  void validate() const;
};

struct Track {
  TrackId id = 0;
  Point2 centroid;
  std::optional<Point2> pos_centroid;
  std::optional<Point2> neg_centroid;
  std::optional<double> theta_deg;  // [-180, 180)
  std::int64_t last_seen_us = 0;
  std::uint64_t hits = 0;
};

struct TrackerState {
  std::map<TrackId, Track> tracks;
  TrackId next_id = 1;
  KdTree2 index;

  /// Rebuilds the k-d index from the current track centroids.
  void reindex();
};

struct ClusterSummary {
  Point2 centroid;
  PixelRect bbox;
  std::size_t size = 0;
};

struct Detection {
  TrackId track_id = 0;
  Point2 centroid;
  std::optional<double> theta_deg;
  std::size_t cluster_size = 0;
  PixelRect bbox;
};

struct StepResult {
  std::int64_t t_us = 0;
  std::vector<Detection> detections;
  std::vector<TrackId> created_ids;
  std::vector<ClusterSummary> full_clusters;
  std::vector<ClusterSummary> pos_clusters;
  std::vector<ClusterSummary> neg_clusters;
};

enum class MatchKind {
  Created,
  Updated,
  /// Within sigma of a track that an earlier, larger cluster already claimed
  /// this step and no unclaimed track is within sigma: a fragment of a robot
  /// that is already accounted for.
  Absorbed,
};

struct MatchOutcome {
  TrackId track_id = 0;
  MatchKind kind = MatchKind::Created;

  bool created() const noexcept { return kind == MatchKind::Created; }
};

/// Ids already updated during the current step.
using StepClaims = std::set<TrackId>;

/// One IDTrack association for a full-cluster centroid. Creates a track when
/// no track lies within sigma; otherwise updates the nearest unclaimed track
/// within sigma. Keeps `state.index` consistent with the track centroids.
MatchOutcome match_or_create(TrackerState& state, const Point2& centroid, double sigma_px,
                             std::int64_t t_us, StepClaims& claims);
MatchOutcome match_or_create(TrackerState& state, const Point2& centroid, double sigma_px,
                             std::int64_t t_us = 0);

/// Attaches each polarity centroid to its nearest track when within sigma.
/// Per track and polarity the closest centroid wins; the rest are dropped.
/// Returns the ids of tracks that received at least one polarity centroid.
std::set<TrackId> associate_polarity(TrackerState& state, std::span<const Point2> pos_centroids,
                                     std::span<const Point2> neg_centroids, double sigma_px);

/// Direction from the positive-event centroid to the negative-event centroid,
/// degrees in [-180, 180). Image coordinates: 0 is +x, 90 is +y (down).
/// Throws DegenerateHeading when the centroids coincide.
double heading(const Point2& pos_centroid, const Point2& neg_centroid);

/// Runs detection and IDTrack on one window. Tracks that are not matched keep
/// their state; they are never deleted unless `max_age_us` is set.
StepResult step(TrackerState& state, const EventWindow& window, const TrackerConfig& config);

/// Owns a TrackerState and applies step() to successive windows.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  StepResult step(const EventWindow& window);

  const TrackerState& state() const noexcept { return state_; }
  const TrackerConfig& config() const noexcept { return config_; }

 private:
  TrackerConfig config_;
  TrackerState state_;
};

}  // namespace evtrack
