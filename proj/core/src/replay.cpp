#include "evtrack/replay.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

// 3x5 digits, one row per entry, bit 2 is the left column.
constexpr std::uint8_t kDigits[10][5] = {
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
};

void draw_number(Image& img, std::int32_t x, std::int32_t y, std::uint32_t value, Rgb c) {
  const std::string text = std::to_string(value);
  for (char ch : text) {
    const auto& glyph = kDigits[ch - '0'];
    for (std::int32_t row = 0; row < 5; ++row) {
      for (std::int32_t col = 0; col < 3; ++col) {
        if (glyph[row] & (4 >> col)) img.set(x + col, y + row, c);
      }
    }
    x += 4;
  }
}

void draw_outline(Image& img, std::int32_t x0, std::int32_t y0, std::int32_t x1, std::int32_t y1, Rgb c) {
  for (std::int32_t x = x0; x <= x1; ++x) {
    img.set(x, y0, c);
    img.set(x, y1, c);
  }
  for (std::int32_t y = y0; y <= y1; ++y) {
    img.set(x0, y, c);
    img.set(x1, y, c);
  }
}

}  // namespace

Image::Image(std::int32_t w, std::int32_t h, Rgb fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

Rgb Image::at(std::int32_t x, std::int32_t y) const {
  return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
}

void Image::set(std::int32_t x, std::int32_t y, Rgb c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = c;
}

Image render_frame(const EventWindow& window, std::span<const TrackRow> detections,
                   const SensorGeometry& geometry, double box_half_px) {
  geometry.validate();
  Image img(geometry.width_px, geometry.height_px, kWhite);
  for (const Event& e : window.events) {
    img.set(e.x, e.y, e.polarity == Polarity::Positive ? kBlack : kBlue);
  }
  const auto half = static_cast<std::int32_t>(std::lround(box_half_px));
  for (const TrackRow& d : detections) {
    const auto cx = static_cast<std::int32_t>(std::lround(d.position.x));
    const auto cy = static_cast<std::int32_t>(std::lround(d.position.y));
    draw_outline(img, cx - half, cy - half, cx + half, cy + half, kRed);
    draw_number(img, cx - half, cy - half - 7, d.track_id, kRed);
  }
  return img;
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size() * 3);
  for (const Rgb& p : image.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

std::size_t replay(std::span<const Event> events, std::span<const TrackRow> tracks,
                   const RunConfig& config, const std::string& out_dir) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cli", "cannot create " + out_dir + ": " + ec.message());

  // Same windows as the track command; extended only if track rows outlive
  // the events (e.g. a tracks file from a longer run).
  std::vector<EventWindow> windows = window_events(events, config.t_a_us, config.step_us, 0);
  const std::int64_t last_close = windows.empty() ? 0 : windows.back().t_end_us;
  if (!tracks.empty() && tracks.back().t_us > last_close) {
    windows = window_events(events, config.t_a_us, config.step_us, 0, tracks.back().t_us);
  }

  std::map<std::int64_t, std::vector<TrackRow>> by_time;
  for (const TrackRow& r : tracks) by_time[r.t_us].push_back(r);

  std::size_t n = 0;
  for (const EventWindow& w : windows) {
    const auto it = by_time.find(w.t_end_us);
    const std::span<const TrackRow> rows =
        it == by_time.end() ? std::span<const TrackRow>{} : std::span<const TrackRow>(it->second);
    const Image img = render_frame(w, rows, config.geometry, config.sigma_px / 2.0);
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.ppm", ++n);
    write_file((std::filesystem::path(out_dir) / name).string(), encode_ppm(img));
  }
  return n;
}

}  // namespace evtrack
