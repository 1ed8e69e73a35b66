#include "evtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "metrics";

template <typename Objects, typename IdOf>
void require_unique_ids(const Objects& objects, IdOf id_of, std::int64_t t_us, const char* what) {
  std::set<std::uint32_t> seen;
  for (const auto& o : objects) {
    if (!seen.insert(id_of(o)).second) {
      throw Error(ErrorCode::DuplicateId, kModule,
                  std::string(what) + " id " + std::to_string(id_of(o)) + " repeated at t=" +
                      std::to_string(t_us));
    }
  }
}

}  // namespace

void MatchConfig::validate() const {
  if (!(t_match_px > 0.0)) throw Error(ErrorCode::InvalidParameter, kModule, "t_match_px must be positive");
  if (!(px_per_cm > 0.0)) throw Error(ErrorCode::InvalidParameter, kModule, "px_per_cm must be positive");
}

std::vector<FrameMatch> correspond(std::span<const FrameTruth> truth,
                                   std::span<const FrameHypothesis> hyp,
                                   const MatchConfig& cfg) {
  cfg.validate();
  if (truth.size() != hyp.size()) {
    throw Error(ErrorCode::FrameAlignmentError, kModule,
                std::to_string(truth.size()) + " truth frames vs " + std::to_string(hyp.size()) +
                    " hypothesis frames");
  }
  std::vector<FrameMatch> out;
  out.reserve(truth.size());
  std::map<RobotId, TrackId> previous;   // pairs of the previous frame
  std::map<RobotId, TrackId> last_seen;  // most recent mapping per truth id

  for (std::size_t f = 0; f < truth.size(); ++f) {
    const FrameTruth& ft = truth[f];
    const FrameHypothesis& fh = hyp[f];
    if (ft.t_us != fh.t_us) {
      throw Error(ErrorCode::FrameAlignmentError, kModule,
                  "frame " + std::to_string(f) + ": truth t=" + std::to_string(ft.t_us) +
                      " hypothesis t=" + std::to_string(fh.t_us));
    }
    require_unique_ids(ft.objects, [](const TruthObject& o) { return o.gt_id; }, ft.t_us, "truth");
    require_unique_ids(fh.objects, [](const HypothesisObject& o) { return o.track_id; }, fh.t_us,
                       "track");

    FrameMatch fm;
    fm.t_us = ft.t_us;
    fm.gt_count = ft.objects.size();
    std::vector<bool> gt_used(ft.objects.size(), false);
    std::vector<bool> hyp_used(fh.objects.size(), false);

    auto record = [&](std::size_t gi, std::size_t hi, double d) {
      const TruthObject& g = ft.objects[gi];
      const HypothesisObject& h = fh.objects[hi];
      gt_used[gi] = true;
      hyp_used[hi] = true;
      fm.pairs.push_back({g.gt_id, h.track_id, g.position, h.position, g.theta_deg, h.theta_deg, d});
    };

    for (std::size_t gi = 0; gi < ft.objects.size(); ++gi) {
      const auto prev = previous.find(ft.objects[gi].gt_id);
      if (prev == previous.end()) continue;
      for (std::size_t hi = 0; hi < fh.objects.size(); ++hi) {
        if (fh.objects[hi].track_id != prev->second) continue;
        const double d = distance(ft.objects[gi].position, fh.objects[hi].position);
        if (d <= cfg.t_match_px) record(gi, hi, d);
        break;
      }
    }

    std::vector<std::tuple<double, RobotId, TrackId, std::size_t, std::size_t>> candidates;
    for (std::size_t gi = 0; gi < ft.objects.size(); ++gi) {
      if (gt_used[gi]) continue;
      for (std::size_t hi = 0; hi < fh.objects.size(); ++hi) {
        if (hyp_used[hi]) continue;
        const double d = distance(ft.objects[gi].position, fh.objects[hi].position);
        if (d <= cfg.t_match_px) {
          candidates.emplace_back(d, ft.objects[gi].gt_id, fh.objects[hi].track_id, gi, hi);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [d, gid, tid, gi, hi] : candidates) {
      if (gt_used[gi] || hyp_used[hi]) continue;
      record(gi, hi, d);
      const auto last = last_seen.find(gid);
      if (last != last_seen.end() && last->second != tid) ++fm.mismatches;
    }

    previous.clear();
    for (const MatchedPair& p : fm.pairs) {
      previous[p.gt_id] = p.track_id;
      last_seen[p.gt_id] = p.track_id;
    }
    fm.misses = fm.gt_count - fm.pairs.size();
    fm.false_positives = fh.objects.size() - fm.pairs.size();
    out.push_back(std::move(fm));
  }
  return out;
}

DetectionCounts totals(std::span<const FrameMatch> frames) {
  DetectionCounts c;
  for (const FrameMatch& f : frames) {
    c.tp += f.pairs.size();
    c.fp += f.false_positives;
    c.fn += f.misses;
  }
  return c;
}

PrecisionRecall precision_recall(const DetectionCounts& counts) {
  PrecisionRecall pr;
  if (counts.tp + counts.fp > 0) {
    pr.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    pr.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  return pr;
}

double mae_distance(std::span<const FrameMatch> frames, double px_per_cm) {
  if (!(px_per_cm > 0.0)) throw Error(ErrorCode::InvalidParameter, kModule, "px_per_cm must be positive");
  double sum = 0.0;
  std::size_t n = 0;
  for (const FrameMatch& f : frames) {
    for (const MatchedPair& p : f.pairs) {
      sum += p.distance_px;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::NoMatches, kModule, "no matched pairs");
  return sum / static_cast<double>(n) / px_per_cm;
}

double mae_theta(std::span<const FrameMatch> frames) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const FrameMatch& f : frames) {
    for (const MatchedPair& p : f.pairs) {
      if (!p.hypothesis_theta_deg) continue;
      sum += angular_error_deg(*p.hypothesis_theta_deg, p.truth_theta_deg);
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::NoHeadings, kModule, "no matched pair carries a heading");
  return sum / static_cast<double>(n);
}

double mota(std::span<const FrameMatch> frames) {
  std::size_t errors = 0;
  std::size_t gt = 0;
  for (const FrameMatch& f : frames) {
    errors += f.misses + f.false_positives + f.mismatches;
    gt += f.gt_count;
  }
  if (gt == 0) throw Error(ErrorCode::NoGroundTruth, kModule, "no ground-truth objects");
  return 1.0 - static_cast<double>(errors) / static_cast<double>(gt);
}

double n_avg_clusters(std::span<const std::size_t> clusters_per_frame, std::size_t n_robots) {
  if (n_robots == 0) throw Error(ErrorCode::InvalidParameter, kModule, "n_robots must be >= 1");
  if (clusters_per_frame.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t c : clusters_per_frame) sum += static_cast<double>(c) / static_cast<double>(n_robots);
  return sum / static_cast<double>(clusters_per_frame.size());
}

double a_ratio(double bbox_area_px2, double actual_area_px2) {
  if (!(actual_area_px2 > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, kModule, "actual area must be positive");
  }
  if (bbox_area_px2 < 0.0) throw Error(ErrorCode::InvalidParameter, kModule, "negative detected area");
  return bbox_area_px2 / actual_area_px2;
}

std::vector<FrameHypothesis> align_to_truth(std::span<const FrameTruth> truth,
                                            std::span<const FrameHypothesis> hyp) {
  std::map<std::int64_t, const FrameHypothesis*> by_time;
  for (const FrameHypothesis& h : hyp) {
    if (!by_time.emplace(h.t_us, &h).second) {
      throw Error(ErrorCode::FrameAlignmentError, kModule,
                  "duplicate hypothesis frame t=" + std::to_string(h.t_us));
    }
  }
  const std::int64_t last_truth = truth.empty() ? std::int64_t{-1} : truth.back().t_us;
  std::set<std::int64_t> truth_times;
  std::vector<FrameHypothesis> out;
  out.reserve(truth.size());
  for (const FrameTruth& t : truth) {
    truth_times.insert(t.t_us);
    const auto it = by_time.find(t.t_us);
    out.push_back(it == by_time.end() ? FrameHypothesis{t.t_us, {}} : *it->second);
  }
  for (const auto& entry : by_time) {
    const std::int64_t t = entry.first;
    if (t > last_truth) break;
    if (!truth_times.contains(t)) {
      throw Error(ErrorCode::FrameAlignmentError, kModule,
                  "hypothesis frame t=" + std::to_string(t) + " has no truth frame");
    }
  }
  return out;
}

EvalReport evaluate(std::span<const FrameTruth> truth, std::span<const FrameHypothesis> hyp,
                    const MatchConfig& cfg) {
  cfg.validate();
  std::size_t first = 0;
  while (first < truth.size() && truth[first].t_us < cfg.eval_start_us) ++first;
  if (hyp.size() != truth.size()) {
    throw Error(ErrorCode::FrameAlignmentError, kModule, "truth and hypothesis frame counts differ");
  }
  const std::vector<FrameMatch> frames = correspond(truth.subspan(first), hyp.subspan(first), cfg);

  EvalReport r;
  const DetectionCounts c = totals(frames);
  const PrecisionRecall pr = precision_recall(c);
  r.precision = pr.precision;
  r.recall = pr.recall;
  r.tp = c.tp;
  r.fp = c.fp;
  r.fn = c.fn;
  r.n_frames = frames.size();
  for (const FrameMatch& f : frames) {
    r.misses += f.misses;
    r.false_positives += f.false_positives;
    r.mismatches += f.mismatches;
    r.gt_total += f.gt_count;
  }
  if (c.tp > 0) r.mae_distance_cm = mae_distance(frames, cfg.px_per_cm);
  try {
    r.mae_theta_deg = mae_theta(frames);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoHeadings) throw;
  }
  if (r.gt_total > 0) r.mota = mota(frames);
  return r;
}

}  // namespace evtrack
