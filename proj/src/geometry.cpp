#include "rollpass/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace rollpass {

namespace {

constexpr double kDomainTol = 1e-9;

// Knot tangents for the shape-preserving cubic Hermite interpolant
// (Fritsch-Carlson). Tangents are zeroed at local extrema and limited to
// 3x the adjacent secant slopes, so every segment stays monotone between
// its endpoints and the curve never leaves the knot value range.
std::vector<double> solve_knot_tangents(const std::vector<Point2>& p) {
  const std::size_t n = p.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = p[i + 1].x - p[i].x;
    d[i] = (p[i + 1].y - p[i].y) / h[i];
  }
  std::vector<double> t(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] > 0.0) {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      t[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  const auto endpoint = [](double h0, double h1, double d0, double d1) {
    double v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (v * d0 <= 0.0) {
      return 0.0;
    }
    if (d0 * d1 < 0.0 && std::abs(v) > 3.0 * std::abs(d0)) {
      return 3.0 * d0;
    }
    return v;
  };
  t[0] = endpoint(h[0], h[1], d[0], d[1]);
  t[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return t;
}

}  // namespace

ProfileCurve::ProfileCurve(std::vector<Point2> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 4) {
    throw TooFewKnots("profile curve needs at least 4 knots, got " +
                      std::to_string(knots_.size()));
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].x > knots_[i - 1].x)) {
      throw NonMonotonicKnots("knot x values must be strictly increasing at index " +
                              std::to_string(i));
    }
  }
  tan_ = solve_knot_tangents(knots_);
}

double ProfileCurve::operator()(double x) const {
  const double lo = knots_.front().x;
  const double hi = knots_.back().x;
  const double tol = kDomainTol * std::max(1.0, hi - lo);
  if (x < lo - tol || x > hi + tol) {
    throw CurveDomainError("evaluation at x=" + std::to_string(x) +
                           " outside curve span [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  x = std::clamp(x, lo, hi);
  // locate segment i with x in [x_i, x_{i+1}]
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Point2& k) { return v < k.x; });
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  i = std::min(std::max<std::size_t>(i, 1), knots_.size() - 1) - 1;

  const double h = knots_[i + 1].x - knots_[i].x;
  const double t = (x - knots_[i].x) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * knots_[i].y +
         (t3 - 2.0 * t2 + t) * h * tan_[i] +
         (-2.0 * t3 + 3.0 * t2) * knots_[i + 1].y +
         (t3 - t2) * h * tan_[i + 1];
}

ProfileCurve ProfileCurve::shifted(double dx, double dy) const {
  std::vector<Point2> k = knots_;
  for (auto& p : k) {
    p.x += dx;
    p.y += dy;
  }
  return ProfileCurve(std::move(k));
}

ProfileCurve fit_profile_curve(std::vector<Point2> knots) {
  return ProfileCurve(std::move(knots));
}

RollProfile::RollProfile(ProfileCurve over, ProfileCurve under, double width_mm)
    : over_(std::move(over)), under_(std::move(under)), width_(width_mm) {
  if (!(width_ >= 80.0 && width_ <= 200.0)) {
    throw Error("roll width " + std::to_string(width_) + " mm outside [80, 200]");
  }
  const double span_tol = 1e-6;
  for (const ProfileCurve* c : {&over_, &under_}) {
    if (std::abs(c->x_first()) > span_tol || std::abs(c->x_last() - width_) > span_tol) {
      throw Error("curve span does not match roll width");
    }
  }
  if (min_vertical_gap(*this) < 4.0 - 1e-9) {
    throw Error("vertical gap below the 4 mm floor");
  }
}

Disk::Disk(Point2 c, double r) : center(c), radius(r) {
  if (!(radius > 0.0)) {
    throw Error("disk radius must be positive");
  }
}

Scenario::Scenario(RollProfile p, double diameter, double temperature, std::uint64_t s)
    : profile(std::move(p)), diameter_mm(diameter), temperature_c(temperature), seed(s) {
  bool known = false;
  for (double d : kDiameterSet) {
    known = known || std::abs(d - diameter_mm) < 1e-9;
  }
  if (!known) {
    throw Error("diameter " + std::to_string(diameter_mm) + " mm not in the admissible set");
  }
  if (!(temperature_c >= 900.0 && temperature_c <= 1100.0)) {
    throw Error("temperature outside [900, 1100] C");
  }
}

double gap_area(const RollProfile& profile) {
  const int n = 2000;
  const double step = profile.width() / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * step;
    sum += std::max(profile.over()(x) - profile.under()(x), 0.0);
  }
  return sum * step;
}

double min_vertical_gap(const RollProfile& profile) {
  const int n = 2000;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double x = profile.width() * i / n;
    best = std::min(best, profile.over()(x) - profile.under()(x));
  }
  return best;
}

double gap_midline(const RollProfile& profile) {
  const int n = 2000;
  double min_over = std::numeric_limits<double>::infinity();
  double max_under = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double x = profile.width() * i / n;
    min_over = std::min(min_over, profile.over()(x));
    max_under = std::max(max_under, profile.under()(x));
  }
  return 0.5 * (min_over + max_under);
}

Disk place_disk(const RollProfile& profile, double diameter_mm) {
  return Disk({profile.width() / 2.0, gap_midline(profile)}, diameter_mm / 2.0);
}

double penetration_area(const RollProfile& profile, const Disk& disk) {
  // Column sweep over the disk's bounding box: 2000 midpoint columns, each
  // contributing the exact length of the disk chord lying outside the gap.
  const int n = 2000;
  const double r = disk.radius;
  const double cx = disk.center.x;
  const double cy = disk.center.y;
  const double dx = 2.0 * r / n;
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = cx - r + (i + 0.5) * dx;
    if (x < 0.0 || x > profile.width()) {
      continue;  // no roll material beside the stand
    }
    const double h = std::sqrt(std::max(r * r - (x - cx) * (x - cx), 0.0));
    const double chord_lo = cy - h;
    const double chord_hi = cy + h;
    const double gap_lo = profile.under()(x);
    const double gap_hi = profile.over()(x);
    const double inside = std::max(0.0, std::min(chord_hi, gap_hi) - std::max(chord_lo, gap_lo));
    area += ((chord_hi - chord_lo) - inside) * dx;
  }
  return area;
}

double max_diameter_for_gap_area(double gap_area_mm2) {
  return 2.0 * std::sqrt(gap_area_mm2 / 3.14159265358979323846);
}

}  // namespace rollpass
