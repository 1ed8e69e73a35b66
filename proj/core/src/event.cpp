#include "evtrack/event.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr std::string_view kModule = "event_core";
constexpr std::string_view kHeader = "t_us,x,y,p";

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line_no, const std::string& what) {
  throw Error(code, std::string(kModule), "line " + std::to_string(line_no) + ": " + what);
}

std::int64_t parse_field(std::string_view field, std::size_t line_no) {
  std::int64_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    fail(ErrorCode::MalformedRecord, line_no,
         "expected an integer, got '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void SensorGeometry::validate() const {
  if (width_px <= 0 || height_px <= 0) {
    throw Error(ErrorCode::InvalidParameter, std::string(kModule),
                "sensor geometry must be strictly positive");
  }
}

std::vector<Event> parse_event_stream(std::string_view text, const SensorGeometry& geometry) {
  geometry.validate();
  std::vector<Event> events;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::int64_t last_t = 0;

  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim_right(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;

    if (!saw_header) {
      if (line != kHeader) {
        throw Error(ErrorCode::MissingHeader, std::string(kModule),
                    "first line must be '" + std::string(kHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;

    std::string_view fields[4];
    std::size_t n_fields = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(start, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - start);
      if (n_fields == 4) {
        fail(ErrorCode::MalformedRecord, line_no, "expected 4 fields");
      }
      fields[n_fields++] = field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (n_fields != 4) fail(ErrorCode::MalformedRecord, line_no, "expected 4 fields");

    const std::int64_t t = parse_field(fields[0], line_no);
    const std::int64_t x = parse_field(fields[1], line_no);
    const std::int64_t y = parse_field(fields[2], line_no);
    const std::int64_t p = parse_field(fields[3], line_no);
    if (t < 0) fail(ErrorCode::MalformedRecord, line_no, "negative timestamp");
    if (p != 0 && p != 1) fail(ErrorCode::MalformedRecord, line_no, "polarity must be 0 or 1");
    if (!geometry.contains(x, y)) {
      fail(ErrorCode::CoordinateOutOfRange, line_no,
           "(" + std::to_string(x) + ", " + std::to_string(y) + ") outside " +
               std::to_string(geometry.width_px) + "x" + std::to_string(geometry.height_px));
    }
    if (!events.empty() && t < last_t) {
      fail(ErrorCode::NonMonotonicTimestamp, line_no,
           std::to_string(t) + " after " + std::to_string(last_t));
    }
    last_t = t;
    events.push_back(Event{t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                           p == 1 ? Polarity::Positive : Polarity::Negative});
  }
  if (!saw_header) {
    throw Error(ErrorCode::MissingHeader, std::string(kModule), "empty input");
  }
  return events;
}

std::vector<Event> parse_event_stream(std::istream& in, const SensorGeometry& geometry) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_event_stream(std::string_view(text), geometry);
}

std::vector<Event> read_event_file(const std::string& path, const SensorGeometry& geometry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, std::string(kModule), "cannot open " + path);
  return parse_event_stream(in, geometry);
}

void write_event_stream(std::ostream& out, std::span<const Event> events) {
  std::string buf;
  buf.reserve(64 + events.size() * 20);
  buf.append(kHeader);
  buf.push_back('\n');
  char tmp[24];
  auto put = [&](std::int64_t v) {
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
    buf.append(tmp, ptr);
  };
  for (const Event& e : events) {
    put(e.t_us);
    buf.push_back(',');
    put(e.x);
    buf.push_back(',');
    put(e.y);
    buf.push_back(',');
    buf.push_back(e.polarity == Polarity::Positive ? '1' : '0');
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string serialize_event_stream(std::span<const Event> events) {
  std::ostringstream out;
  write_event_stream(out, events);
  return out.str();
}

std::vector<EventWindow> window_events(std::span<const Event> stream, std::int64_t t_a_us,
                                       std::int64_t step_us, std::int64_t t_start_us,
                                       std::optional<std::int64_t> cover_until_us) {
  if (t_a_us <= 0 || step_us <= 0) {
    throw Error(ErrorCode::InvalidParameter, std::string(kModule),
                "t_a_us and step_us must be positive");
  }
  std::vector<EventWindow> windows;
  if (stream.empty() && !cover_until_us) return windows;

  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::int64_t k = 1;; ++k) {
    const std::int64_t t_end = t_start_us + k * step_us;
    const std::int64_t t_begin = t_end - t_a_us;
    while (lo < stream.size() && stream[lo].t_us <= t_begin) ++lo;
    if (hi < lo) hi = lo;
    while (hi < stream.size() && stream[hi].t_us <= t_end) ++hi;
    windows.push_back(EventWindow{t_end, t_a_us, stream.subspan(lo, hi - lo)});

    if (cover_until_us) {
      const std::int64_t last =
          stream.empty() ? *cover_until_us : std::max(*cover_until_us, stream.back().t_us);
      if (t_end >= last) break;
    } else if (t_end + step_us - t_a_us >= stream.back().t_us) {
      // The next window would no longer contain the final event.
      break;
    }
  }
  return windows;
}

PolaritySplit split_by_polarity(const EventWindow& window) {
  PolaritySplit out;
  out.all.assign(window.events.begin(), window.events.end());
  for (const Event& e : window.events) {
    (e.polarity == Polarity::Positive ? out.positives : out.negatives).push_back(e);
  }
  return out;
}

}  // namespace evtrack
