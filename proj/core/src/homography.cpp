#include "evtrack/homography.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "evtrack/error.hpp"

namespace evtrack {
namespace {

constexpr const char* kModule = "homography";
constexpr double kCollinearArea = 1e-9;
constexpr double kSingular = 1e-12;

// Intermediate arithmetic runs in extended precision; results are stored as double.
using Real = long double;
using Mat3 = std::array<std::array<Real, 3>, 3>;

Mat3 widen(const std::array<std::array<double, 3>, 3>& h) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = h[i][j];
  }
  return m;
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Real s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  }
  return r;
}

Real det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse3(const Mat3& m) {
  const Real d = det3(m);
  if (!(std::abs(d) > kSingular)) {
    throw Error(ErrorCode::DegenerateConfiguration, kModule, "singular matrix");
  }
  Mat3 r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
  return r;
}

Homography normalized(const Mat3& m) {
  if (!(std::abs(m[2][2]) > kSingular)) {
    throw Error(ErrorCode::DegenerateConfiguration, kModule, "h33 vanishes; cannot normalize");
  }
  Homography H;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) H.h[i][j] = static_cast<double>(m[i][j] / m[2][2]);
  }
  H.h[2][2] = 1.0;
  return H;
}

void require_general_position(const Quad& q, const char* which) {
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : kTriples) {
    const Point2& a = q[t[0]];
    const Point2& b = q[t[1]];
    const Point2& c = q[t[2]];
    const double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    if (area <= kCollinearArea) {
      throw Error(ErrorCode::DegenerateConfiguration, kModule,
                  std::string("three collinear ") + which + " points");
    }
  }
}

struct Conditioner {
  Mat3 forward;
  Mat3 backward;
};

/// Similarity taking the quad's centroid to the origin and its mean distance
/// from the centroid to sqrt(2).
Conditioner conditioner(const Quad& q) {
  Real cx = 0.0;
  Real cy = 0.0;
  for (const Point2& p : q) {
    cx += p.x;
    cy += p.y;
  }
  cx /= 4.0;
  cy /= 4.0;
  Real mean = 0.0;
  for (const Point2& p : q) mean += std::hypot(p.x - cx, p.y - cy);
  mean /= 4.0;
  const Real s = std::sqrt(2.0L) / mean;
  return {Mat3{{{s, 0.0, -s * cx}, {0.0, s, -s * cy}, {0.0, 0.0, 1.0}}},
          Mat3{{{1.0 / s, 0.0, cx}, {0.0, 1.0 / s, cy}, {0.0, 0.0, 1.0}}}};
}

struct PointR {
  Real x;
  Real y;
};

PointR transform(const Mat3& m, const Point2& p) {
  const Real w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w, (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

}  // namespace

Homography solve_homography(const Quad& src, const Quad& dst) {
  require_general_position(src, "source");
  require_general_position(dst, "destination");

  const Conditioner cs = conditioner(src);
  const Conditioner cd = conditioner(dst);
  Real a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const PointR s = transform(cs.forward, src[i]);
    const PointR d = transform(cd.forward, dst[i]);
    Real* r0 = a[2 * i];
    Real* r1 = a[2 * i + 1];
    // u = (h11 x + h12 y + h13) / (h31 x + h32 y + 1), likewise v.
    r0[0] = s.x; r0[1] = s.y; r0[2] = 1.0;
    r0[6] = -s.x * d.x; r0[7] = -s.y * d.x; r0[8] = d.x;
    r1[3] = s.x; r1[4] = s.y; r1[5] = 1.0;
    r1[6] = -s.x * d.y; r1[7] = -s.y * d.y; r1[8] = d.y;
  }

  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (!(std::abs(a[pivot][col]) > kSingular)) {
      throw Error(ErrorCode::DegenerateConfiguration, kModule, "singular correspondence system");
    }
    if (pivot != col) std::swap(a[pivot], a[col]);
    for (int r = col + 1; r < 8; ++r) {
      const Real f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Real x[8];
  for (int r = 7; r >= 0; --r) {
    Real s = a[r][8];
    for (int c = r + 1; c < 8; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }

  const Mat3 hn{{{x[0], x[1], x[2]}, {x[3], x[4], x[5]}, {x[6], x[7], 1.0}}};
  // Undo the conditioning: H = Td^-1 * Hn * Ts.
  return normalized(multiply(cd.backward, multiply(hn, cs.forward)));
}

Point2 apply(const Homography& H, const Point2& p) {
  const Mat3 m = widen(H.h);
  const Real w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  if (!(std::abs(w) > kSingular)) {
    throw Error(ErrorCode::PointAtInfinity, kModule, "homogeneous denominator vanishes");
  }
  return {static_cast<double>((m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w),
          static_cast<double>((m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w)};
}

Homography inverse(const Homography& H) { return normalized(inverse3(widen(H.h))); }

Homography compose(const Homography& a, const Homography& b) {
  return normalized(multiply(widen(a.h), widen(b.h)));
}

double determinant(const Homography& H) noexcept { return static_cast<double>(det3(widen(H.h))); }

}  // namespace evtrack
