#include "rollpass/rollgen.hpp"

#include <algorithm>
#include <cmath>

namespace rollpass {

namespace {

// Smooth unit bump on (-1, 1), zero outside.
double bump(double u) {
  if (u <= -1.0 || u >= 1.0) {
    return 0.0;
  }
  const double c = std::cos(1.57079632679489662 * u);
  return c * c;
}

// Home level with random grooves cut toward the opposing roll, plus knot
// jitter, clipped to the box. sign = +1 draws the over roll (positive
// level, grooves dig downward); -1 mirrors everything for the under roll.
std::vector<double> draw_groove_field(RngStream& rng, const GenConfig& cfg,
                                      const std::vector<double>& xs, double sign) {
  const double level = sign * rng.uniform(cfg.level_lo, cfg.level_hi);
  const int grooves = 1 + static_cast<int>(rng.uniform_int(cfg.grooves_max));
  std::vector<double> center(grooves), halfwidth(grooves), depth(grooves);
  for (int g = 0; g < grooves; ++g) {
    center[g] = rng.uniform(-cfg.groove_center_span, cfg.groove_center_span);
    halfwidth[g] = rng.uniform(cfg.groove_halfwidth_lo, cfg.groove_halfwidth_hi);
    depth[g] = rng.uniform(cfg.groove_depth_lo, cfg.groove_depth_hi);
  }
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double y = level;
    for (int g = 0; g < grooves; ++g) {
      y -= sign * depth[g] * bump((xs[i] - center[g]) / halfwidth[g]);
    }
    y += rng.uniform(-cfg.jitter, cfg.jitter);
    ys[i] = std::clamp(y, cfg.box_lo, cfg.box_hi);
  }
  return ys;
}

}  // namespace

ProfileDraft draw_profile_draft(RngStream& rng, const GenConfig& cfg) {
  ProfileDraft draft;
  draft.xs.resize(cfg.knot_count);
  for (double& x : draft.xs) {
    x = rng.uniform(-1.0, 1.0);
  }
  std::sort(draft.xs.begin(), draft.xs.end());
  for (int i = 1; i < cfg.knot_count; ++i) {
    if (draft.xs[i] - draft.xs[i - 1] < 1e-6) {
      draft.xs[i] = draft.xs[i - 1] + 1e-6;
    }
  }

  draft.over_y = draw_groove_field(rng, cfg, draft.xs, 1.0);
  draft.under_y = draw_groove_field(rng, cfg, draft.xs, -1.0);
  for (int i = 0; i < cfg.knot_count; ++i) {
    draft.under_y[i] = std::min(draft.under_y[i], draft.over_y[i] - cfg.min_separation);
  }

  draft.width_mm = rng.uniform(cfg.width_lo, cfg.width_hi);
  return draft;
}

RollProfile realize_profile(const ProfileDraft& draft, const GenConfig& cfg) {
  const double x0 = draft.xs.front();
  const double span = draft.xs.back() - x0;
  const double s = draft.width_mm / span;

  const auto scaled = [&](const std::vector<double>& ys) {
    std::vector<Point2> knots(draft.xs.size());
    for (std::size_t i = 0; i < draft.xs.size(); ++i) {
      knots[i] = {(draft.xs[i] - x0) * s, ys[i] * s};
    }
    return fit_profile_curve(std::move(knots));
  };

  ProfileCurve over = scaled(draft.over_y);
  ProfileCurve under = scaled(draft.under_y);

  // Lift the over curve if the sampled minimum gap lands below the floor.
  // Large lifts can lose a few ulps through the knot refit, so re-measure
  // until the minimum holds.
  for (int pass = 0; pass < 4; ++pass) {
    double gap = over(0.0) - under(0.0);
    for (int i = 1; i <= 2000; ++i) {
      const double x = draft.width_mm * i / 2000.0;
      gap = std::min(gap, over(x) - under(x));
    }
    if (gap >= cfg.min_gap_mm) {
      break;
    }
    over = over.shifted(0.0, cfg.min_gap_mm - gap);
  }

  return RollProfile(std::move(over), std::move(under), draft.width_mm);
}

RollProfile generate_profile(RngStream& rng, const GenConfig& cfg) {
  return realize_profile(draw_profile_draft(rng, cfg), cfg);
}

std::vector<double> feasible_diameters(const RollProfile& profile,
                                       const GenConfig& cfg) {
  const double bound = max_diameter_for_gap_area(gap_area(profile));
  // The disk center does not depend on the candidate diameter; compute it
  // once instead of re-sampling both curves per candidate.
  const Point2 center{profile.width() / 2.0, gap_midline(profile)};
  std::vector<double> out;
  for (double d : kDiameterSet) {
    if (d > bound) {
      continue;
    }
    const Disk disk(center, d / 2.0);
    const double ratio =
        penetration_area(profile, disk) / (3.14159265358979323846 * disk.radius * disk.radius);
    if (ratio >= cfg.ratio_lo && ratio <= cfg.ratio_hi) {
      out.push_back(d);
    }
  }
  return out;
}

double select_diameter(const RollProfile& profile, RngStream& rng,
                       const GenConfig& cfg) {
  const std::vector<double> feasible = feasible_diameters(profile, cfg);
  if (feasible.empty()) {
    throw NoFeasibleDiameter("no diameter satisfies both feasibility criteria");
  }
  return feasible[rng.uniform_int(feasible.size())];
}

Scenario generate_scenario(RngStream& rng, const GenConfig& cfg) {
  const std::uint64_t key = rng.state_key();
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    RollProfile profile = generate_profile(rng, cfg);
    try {
      const double diameter = select_diameter(profile, rng, cfg);
      const double temperature = rng.uniform(cfg.temperature_lo, cfg.temperature_hi);
      return Scenario(std::move(profile), diameter, temperature, key);
    } catch (const NoFeasibleDiameter&) {
      continue;
    }
  }
  throw GenerationExhausted("no feasible scenario after " +
                            std::to_string(cfg.max_attempts) + " profiles");
}

}  // namespace rollpass
