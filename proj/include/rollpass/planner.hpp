#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rollpass/estimators.hpp"
#include "rollpass/rollgen.hpp"

namespace rollpass {

// One stand: tooling plus the quarter-turn applied to the inlet entering
// it. The estimator output is rotated back, so downstream stands and the
// plan's final shape stay in the original inlet frame.
struct StandConfig {
  RollProfile profile;
  int rotation = 0;  // degrees CCW, one of {0, 90, 180, 270}
};

struct Plan {
  std::vector<StandConfig> steps;
  Raster final_shape;
  double score = 0.0;
  // Search parameters, recorded for serialization.
  std::string estimator_id;
  std::uint64_t seed = 0;
  int n = 0;
  int d = 0;
};

// Passes the shape through one stand: rotate by config.rotation, rasterize
// the rolls at full closure around it, run the estimator, rotate back.
Raster apply_stand(const Raster& shape, const StandConfig& config,
                   const Estimator& estimator);

struct PlanChild {
  StandConfig config;
  Raster shape;
  double score;
};

// One node's children: n random stands (profile via generate_profile with
// diameter feasibility skipped, rotation uniform over the four quarter
// turns) plus final_config unchanged when provided. Random stands whose
// rolls would not touch the rotated shape are redrawn (bounded attempts),
// so the child count stays exactly n (+1) and each child costs exactly one
// estimator call. A child whose estimator call fails is dropped with a
// warning on stderr.
std::vector<PlanChild> expand(const Raster& shape, const Raster& target,
                              const Estimator& estimator, int n,
                              const std::optional<StandConfig>& final_config,
                              RngStream& rng, const GenConfig& gen = {});

// Breadth-first search to depth d. Every node of levels 1..d is scored by
// jaccard against the target; the best one wins, ties going to the
// shallower level and then to the earlier-created node. Nodes with an
// empty shape are scored but not expanded further. Throws NoViablePlan
// when no child anywhere survived.
Plan plan(const Raster& inlet, const Raster& target, const Estimator& estimator,
          int n, int d, const std::optional<StandConfig>& final_config,
          RngStream& rng, const GenConfig& gen = {});

// Folds the plan's steps over the inlet; bit-equals plan.final_shape when
// run with the plan's own estimator and inlet.
Raster replay(const Plan& plan, const Raster& inlet, const Estimator& estimator);

}  // namespace rollpass
