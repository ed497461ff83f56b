#pragma once

#include <vector>

#include "rollpass/geometry.hpp"
#include "rollpass/rng.hpp"

namespace rollpass {

// Distribution knobs of the procedural generator. The defaults are the
// shipped configuration; every acceptance check runs against them.
//
// Each curve is a random tooling field: a flat home level with one to
// grooves_max smooth grooves cut toward the other roll, plus small i.i.d.
// knot jitter, clipped to the normalized box. Grooves are what bring the
// rolls into workpiece contact; the jitter only textures the surface.
// More than one groove per curve raises the odds that lateral material
// flow gets trapped between groove walls, so the default keeps one.
struct GenConfig {
  int knot_count = 101;
  double box_lo = -1.0;  // normalized y clip box, both curves
  double box_hi = 1.0;
  double level_lo = 0.35;  // home-level magnitude range (over +, under -)
  double level_hi = 1.0;
  int grooves_max = 1;              // 1..grooves_max grooves per curve
  double groove_center_span = 0.95; // groove centers uniform on +-span
  double groove_halfwidth_lo = 0.10;
  double groove_halfwidth_hi = 0.45;
  double groove_depth_lo = 0.30;
  double groove_depth_hi = 1.20;
  double jitter = 0.03;         // i.i.d. knot jitter amplitude
  double min_separation = 0.4;  // normalized pointwise floor at knots
  double width_lo = 80.0;       // mm
  double width_hi = 200.0;
  double min_gap_mm = 4.0;
  double ratio_lo = 0.40;  // penetration-ratio feasibility band
  double ratio_hi = 0.65;
  double temperature_lo = 900.0;  // degC
  double temperature_hi = 1100.0;
  int max_attempts = 1000;  // profile regenerations per scenario
};

// Normalized-coordinate sampling stage, exposed so its rules are
// directly testable before any scaling happens.
struct ProfileDraft {
  std::vector<double> xs;       // sorted, strictly increasing, within [-1, 1+eps]
  std::vector<double> over_y;   // groove field within [box_lo, box_hi]
  std::vector<double> under_y;  // mirrored field, clamped to <= over_y - min_separation
  double width_mm;              // uniform on [width_lo, width_hi]
};

// Draw order: knot x's, over field, under field, width. Ties in the
// sorted x's are resolved by bumping the later value up by 1e-6
// (propagated).
ProfileDraft draw_profile_draft(RngStream& rng, const GenConfig& cfg = {});

// Deterministic realization of a draft: fit both splines, scale x and y
// uniformly so the x-span is [0, width], then shift the over curve up if
// the metric minimum gap falls below min_gap_mm.
RollProfile realize_profile(const ProfileDraft& draft, const GenConfig& cfg = {});

RollProfile generate_profile(RngStream& rng, const GenConfig& cfg = {});

// Diameters from kDiameterSet passing both feasibility criteria:
// (a) D <= 2*sqrt(gap_area/pi), and (b) penetration ratio within
// [ratio_lo, ratio_hi] for the disk placed by place_disk.
std::vector<double> feasible_diameters(const RollProfile& profile,
                                       const GenConfig& cfg = {});

// Uniform choice among the feasible diameters.
// Throws NoFeasibleDiameter when none qualifies.
double select_diameter(const RollProfile& profile, RngStream& rng,
                       const GenConfig& cfg = {});

// Regenerates profiles until one admits a feasible diameter, then draws
// the temperature. Scenario.seed records the stream's resume key from
// before the first draw, so RngStream::from_key(seed) regenerates the
// identical scenario. Throws GenerationExhausted after max_attempts.
Scenario generate_scenario(RngStream& rng, const GenConfig& cfg = {});

}  // namespace rollpass
