#pragma once

#include <cstdint>
#include <vector>

#include "rollpass/errors.hpp"

namespace rollpass {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Interpolating piecewise-cubic spline y(x) over knots with strictly
// increasing x. Knot tangents are shape-preserving (Fritsch-Carlson), so
// the curve is monotone between adjacent knots and never overshoots the
// knot value range. Evaluation is defined on [x_first, x_last] only.
class ProfileCurve {
 public:
  // Throws TooFewKnots (< 4 knots) or NonMonotonicKnots.
  explicit ProfileCurve(std::vector<Point2> knots);

  double operator()(double x) const;  // throws CurveDomainError outside span

  const std::vector<Point2>& knots() const { return knots_; }
  double x_first() const { return knots_.front().x; }
  double x_last() const { return knots_.back().x; }

  // Same curve displaced by (dx, dy).
  ProfileCurve shifted(double dx, double dy) const;

 private:
  std::vector<Point2> knots_;
  std::vector<double> tan_;  // dy/dx at each knot
};

ProfileCurve fit_profile_curve(std::vector<Point2> knots);

// One stand's tooling: the lower boundary of the upper roll ("over"), the
// upper boundary of the lower roll ("under"), both spanning [0, width] mm.
class RollProfile {
 public:
  RollProfile(ProfileCurve over, ProfileCurve under, double width_mm);

  const ProfileCurve& over() const { return over_; }
  const ProfileCurve& under() const { return under_; }
  double width() const { return width_; }

 private:
  ProfileCurve over_;
  ProfileCurve under_;
  double width_;
};

struct Disk {
  Point2 center;
  double radius = 0.0;  // mm, must be > 0

  Disk(Point2 c, double r);
};

// The admissible workpiece diameters, mm.
inline constexpr double kDiameterSet[] = {20, 24, 28, 30, 34, 38, 42, 46,
                                          48, 50, 52, 54, 56, 58, 60};

struct Scenario {
  RollProfile profile;
  double diameter_mm;
  double temperature_c;  // metadata only, [900, 1100]
  std::uint64_t seed;    // rng resume key that regenerates this scenario

  Scenario(RollProfile p, double diameter, double temperature, std::uint64_t seed);
};

// Area of the open region between the curves, integral of
// max(over - under, 0) over [0, width], composite midpoint, 2000 intervals.
double gap_area(const RollProfile& profile);

// Minimum of over(x) - under(x) over 2001 uniform samples of [0, width].
double min_vertical_gap(const RollProfile& profile);

// Area of the disk lying outside the open gap {under(x) < y < over(x)},
// rolls at final position. Columns outside [0, width] leave the disk
// unconstrained and contribute nothing. The disk is expressed in the
// profile frame (x in [0, width]).
double penetration_area(const RollProfile& profile, const Disk& disk);

// Placement convention: the disk sits at x = width/2 with its center on the
// gap's extreme midline, (min over + max under)/2.
Disk place_disk(const RollProfile& profile, double diameter_mm);

// Vertical midline value used by place_disk, (min over + max under)/2
// over 2001 uniform samples.
double gap_midline(const RollProfile& profile);

// Largest admissible diameter for a given gap area: 2*sqrt(A/pi).
double max_diameter_for_gap_area(double gap_area_mm2);

}  // namespace rollpass
