#include "evtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "tracker";

std::vector<PixelPoint> to_points(std::span<const Event> events) {
  std::vector<PixelPoint> pts;
  pts.reserve(events.size());
  for (const Event& e : events) pts.push_back({e.x, e.y});
  return pts;
}

std::vector<ClusterSummary> summarize(const Clustering& c) {
  std::vector<ClusterSummary> out;
  out.reserve(c.clusters.size());
  for (const auto& cl : c.clusters) out.push_back({cl.centroid, cl.bbox, cl.size()});
  return out;
}

TrackId create_track(TrackerState& state, const Point2& c, std::int64_t t_us) {
  const TrackId id = state.next_id++;
  Track t;
  t.id = id;
  t.centroid = c;
  t.last_seen_us = t_us;
  t.hits = 1;
  state.tracks.emplace(id, t);
  state.index.insert(c.x, c.y, id);
  return id;
}

void update_track(TrackerState& state, TrackId id, const Point2& c, std::int64_t t_us) {
  Track& t = state.tracks.at(id);
  t.centroid = c;
  t.last_seen_us = t_us;
  ++t.hits;
  // A moved centroid would break the split invariant in place; rebuild instead.
  state.reindex();
}

/// Per-track closest polarity centroid within sigma.
std::map<TrackId, std::pair<double, Point2>> closest_per_track(const TrackerState& state,
                                                              std::span<const Point2> centroids,
                                                              double sigma_px) {
  std::map<TrackId, std::pair<double, Point2>> best;
  if (state.index.empty()) return best;
  for (const Point2& c : centroids) {
    const NearestResult nn = state.index.nearest(c.x, c.y);
    if (nn.distance > sigma_px) continue;
    auto it = best.find(nn.id);
    if (it == best.end() || nn.distance < it->second.first) best[nn.id] = {nn.distance, c};
  }
  return best;
}

}  // namespace

void TrackerConfig::validate() const {
  if (!(sigma_px > 0.0)) throw Error(ErrorCode::InvalidParameter, kModule, "sigma_px must be positive");
  params_full.validate();
  params_partial.validate();
  geometry.validate();
  if (max_age_us && *max_age_us <= 0) {
    throw Error(ErrorCode::InvalidParameter, kModule, "max_age_us must be positive");
  }
}

void TrackerState::reindex() {
  std::vector<KdEntry> entries;
  entries.reserve(tracks.size());
  for (const auto& [id, t] : tracks) entries.push_back({t.centroid.x, t.centroid.y, id});
  index = KdTree2::rebuild(entries);
}

MatchOutcome match_or_create(TrackerState& state, const Point2& centroid, double sigma_px,
                             std::int64_t t_us, StepClaims& claims) {
  if (state.index.empty()) {
    const TrackId id = create_track(state, centroid, t_us);
    claims.insert(id);
    return {id, MatchKind::Created};
  }
  const NearestResult nn = state.index.nearest(centroid.x, centroid.y);
  if (nn.distance > sigma_px) {
    const TrackId id = create_track(state, centroid, t_us);
    claims.insert(id);
    return {id, MatchKind::Created};
  }
  TrackId target = nn.id;
  if (claims.contains(nn.id)) {
    const auto alt = state.index.nearest_if(
        centroid.x, centroid.y, [&claims](TrackId id) { return !claims.contains(id); });
    if (!alt || alt->distance > sigma_px) return {nn.id, MatchKind::Absorbed};
    target = alt->id;
  }
  update_track(state, target, centroid, t_us);
  claims.insert(target);
  return {target, MatchKind::Updated};
}

MatchOutcome match_or_create(TrackerState& state, const Point2& centroid, double sigma_px,
                             std::int64_t t_us) {
  StepClaims claims;
  return match_or_create(state, centroid, sigma_px, t_us, claims);
}

std::set<TrackId> associate_polarity(TrackerState& state, std::span<const Point2> pos_centroids,
                                     std::span<const Point2> neg_centroids, double sigma_px) {
  std::set<TrackId> touched;
  for (const auto& [id, hit] : closest_per_track(state, pos_centroids, sigma_px)) {
    state.tracks.at(id).pos_centroid = hit.second;
    touched.insert(id);
  }
  for (const auto& [id, hit] : closest_per_track(state, neg_centroids, sigma_px)) {
    state.tracks.at(id).neg_centroid = hit.second;
    touched.insert(id);
  }
  return touched;
}

double heading(const Point2& pos_centroid, const Point2& neg_centroid) {
  const double dx = neg_centroid.x - pos_centroid.x;
  const double dy = neg_centroid.y - pos_centroid.y;
  if (dx == 0.0 && dy == 0.0) {
    throw Error(ErrorCode::DegenerateHeading, kModule, "coincident polarity centroids");
  }
  double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  if (deg >= 180.0) deg -= 360.0;
  return deg;
}

StepResult step(TrackerState& state, const EventWindow& window, const TrackerConfig& config) {
  config.validate();
  StepResult result;
  result.t_us = window.t_end_us;

  const PolaritySplit split = split_by_polarity(window);
  const std::vector<PixelPoint> all_pts = to_points(split.all);
  const std::vector<PixelPoint> pos_pts = to_points(split.positives);
  const std::vector<PixelPoint> neg_pts = to_points(split.negatives);

  const Clustering full = cluster(all_pts, config.params_full);
  const Clustering pos = cluster(pos_pts, config.params_partial);
  const Clustering neg = cluster(neg_pts, config.params_partial);
  result.full_clusters = summarize(full);
  result.pos_clusters = summarize(pos);
  result.neg_clusters = summarize(neg);

  std::vector<std::size_t> order(full.clusters.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&full](std::size_t a, std::size_t b) {
    const Cluster& ca = full.clusters[a];
    const Cluster& cb = full.clusters[b];
    if (ca.size() != cb.size()) return ca.size() > cb.size();
    if (ca.centroid.x != cb.centroid.x) return ca.centroid.x < cb.centroid.x;
    return ca.centroid.y < cb.centroid.y;
  });

  StepClaims claims;
  for (std::size_t idx : order) {
    const Cluster& c = full.clusters[idx];
    const MatchOutcome m = match_or_create(state, c.centroid, config.sigma_px, window.t_end_us, claims);
    if (m.kind == MatchKind::Absorbed) continue;
    if (m.created()) result.created_ids.push_back(m.track_id);
    result.detections.push_back(Detection{m.track_id, c.centroid, std::nullopt, c.size(), c.bbox});
  }

  std::vector<Point2> pos_c;
  std::vector<Point2> neg_c;
  for (const auto& c : pos.clusters) pos_c.push_back(c.centroid);
  for (const auto& c : neg.clusters) neg_c.push_back(c.centroid);
  for (TrackId id : associate_polarity(state, pos_c, neg_c, config.sigma_px)) {
    Track& t = state.tracks.at(id);
    if (!t.pos_centroid || !t.neg_centroid) continue;
    try {
      t.theta_deg = heading(*t.pos_centroid, *t.neg_centroid);
    } catch (const Error&) {
      // Coincident centroids: keep the previous heading.
    }
  }

  if (config.max_age_us) {
    std::erase_if(state.tracks, [&](const auto& kv) {
      return window.t_end_us - kv.second.last_seen_us > *config.max_age_us;
    });
  }
  state.reindex();

  for (Detection& d : result.detections) {
    auto it = state.tracks.find(d.track_id);
    if (it != state.tracks.end()) d.theta_deg = it->second.theta_deg;
  }
  return result;
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

StepResult Tracker::step(const EventWindow& window) { return evtrack::step(state_, window, config_); }

}  // namespace evtrack
