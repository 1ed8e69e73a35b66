#include "evtrack/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "io";

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, kModule, "line " + std::to_string(line_no) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    malformed(line_no, "bad number '" + std::string(field) + "'");
  }
  return value;
}

/// Calls fn(fields, line_no) for every non-blank record after `header`.
template <typename Fn>
void for_each_record(std::istream& in, std::string_view header, std::size_t n_fields, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (!saw_header) {
      if (view != header) {
        throw Error(ErrorCode::MissingHeader, kModule, "expected header '" + std::string(header) + "'");
      }
      saw_header = true;
      continue;
    }
    if (view.empty()) continue;
    const std::vector<std::string_view> fields = split(view);
    if (fields.size() != n_fields) {
      malformed(line_no, "expected " + std::to_string(n_fields) + " fields");
    }
    fn(fields, line_no);
  }
  if (!saw_header) throw Error(ErrorCode::MissingHeader, kModule, "empty input");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, kModule, "cannot open " + path);
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<TrackRow> track_rows(const StepResult& result) {
  std::vector<TrackRow> rows;
  rows.reserve(result.detections.size());
  for (const Detection& d : result.detections) {
    rows.push_back({result.t_us, d.track_id, d.centroid, d.theta_deg, d.cluster_size});
  }
  std::sort(rows.begin(), rows.end(),
            [](const TrackRow& a, const TrackRow& b) { return a.track_id < b.track_id; });
  return rows;
}

void write_tracks_csv(std::ostream& out, std::span<const TrackRow> rows) {
  std::string buf = kTracksHeader;
  buf.push_back('\n');
  for (const TrackRow& r : rows) {
    buf += std::to_string(r.t_us);
    buf.push_back(',');
    buf += std::to_string(r.track_id);
    buf.push_back(',');
    buf += format_double(r.position.x);
    buf.push_back(',');
    buf += format_double(r.position.y);
    buf.push_back(',');
    if (r.theta_deg) buf += format_double(*r.theta_deg);
    buf.push_back(',');
    buf += std::to_string(r.cluster_size);
    buf.push_back('\n');
  }
  out << buf;
}

std::vector<TrackRow> read_tracks_csv(std::istream& in) {
  std::vector<TrackRow> rows;
  for_each_record(in, kTracksHeader, 6, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    TrackRow r;
    r.t_us = parse_number<std::int64_t>(f[0], ln);
    r.track_id = parse_number<TrackId>(f[1], ln);
    r.position = {parse_number<double>(f[2], ln), parse_number<double>(f[3], ln)};
    if (!f[4].empty()) r.theta_deg = parse_number<double>(f[4], ln);
    r.cluster_size = parse_number<std::size_t>(f[5], ln);
    if (!rows.empty() && r.t_us < rows.back().t_us) {
      throw Error(ErrorCode::NonMonotonicTimestamp, kModule, "line " + std::to_string(ln));
    }
    rows.push_back(r);
  });
  return rows;
}

std::vector<TrackRow> read_tracks_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_tracks_csv(in);
}

std::vector<FrameHypothesis> to_hypotheses(std::span<const TrackRow> rows) {
  std::vector<FrameHypothesis> frames;
  for (const TrackRow& r : rows) {
    if (frames.empty() || frames.back().t_us != r.t_us) frames.push_back({r.t_us, {}});
    frames.back().objects.push_back({r.track_id, r.position, r.theta_deg});
  }
  return frames;
}

void write_truth_csv(std::ostream& out, std::span<const FrameTruth> frames) {
  std::string buf = kTruthHeader;
  buf.push_back('\n');
  for (const FrameTruth& f : frames) {
    for (const TruthObject& o : f.objects) {
      buf += std::to_string(f.t_us);
      buf.push_back(',');
      buf += std::to_string(o.gt_id);
      buf.push_back(',');
      buf += format_double(o.position.x);
      buf.push_back(',');
      buf += format_double(o.position.y);
      buf.push_back(',');
      buf += format_double(o.theta_deg);
      buf.push_back('\n');
    }
  }
  out << buf;
}

std::vector<FrameTruth> read_truth_csv(std::istream& in) {
  std::vector<FrameTruth> frames;
  for_each_record(in, kTruthHeader, 5, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    const auto t = parse_number<std::int64_t>(f[0], ln);
    TruthObject o;
    o.gt_id = parse_number<RobotId>(f[1], ln);
    o.position = {parse_number<double>(f[2], ln), parse_number<double>(f[3], ln)};
    o.theta_deg = parse_number<double>(f[4], ln);
    if (!frames.empty() && t < frames.back().t_us) {
      throw Error(ErrorCode::NonMonotonicTimestamp, kModule, "line " + std::to_string(ln));
    }
    if (frames.empty() || frames.back().t_us != t) frames.push_back({t, {}});
    frames.back().objects.push_back(o);
  });
  return frames;
}

std::vector<FrameTruth> read_truth_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_truth_csv(in);
}

std::string report_json(const EvalReport& r) {
  auto optional_number = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["mae_distance_cm"] = optional_number(r.mae_distance_cm);
  j["mae_theta_deg"] = optional_number(r.mae_theta_deg);
  j["mota"] = optional_number(r.mota);
  j["misses"] = r.misses;
  j["false_positives"] = r.false_positives;
  j["mismatches"] = r.mismatches;
  j["gt_total"] = r.gt_total;
  j["n_frames"] = r.n_frames;
  return j.dump(2) + "\n";
}

std::pair<Quad, Quad> read_correspondences(std::istream& in) {
  std::vector<Point2> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::vector<std::string_view> f = split(view);
    if (f.size() != 2) malformed(line_no, "expected x,y");
    pts.push_back({parse_number<double>(f[0], line_no), parse_number<double>(f[1], line_no)});
  }
  if (pts.size() != 8) {
    throw Error(ErrorCode::MalformedRecord, kModule,
                "expected 8 points, got " + std::to_string(pts.size()));
  }
  Quad src;
  Quad dst;
  for (std::size_t i = 0; i < 4; ++i) {
    src[i] = pts[i];
    dst[i] = pts[i + 4];
  }
  return {src, dst};
}

std::pair<Quad, Quad> read_correspondences_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_correspondences(in);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, kModule, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, kModule, "write failed: " + path);
}

}  // namespace evtrack
