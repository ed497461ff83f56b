#include "rollpass/planner.hpp"

#include <algorithm>
#include <iostream>

namespace rollpass {

namespace {

bool touches_rolls(const Raster& shape, const RollMasks& masks) {
  return !intersect(shape, union_of(masks.over, masks.under)).empty();
}

Raster rotate_if(const Raster& r, int q) {
  return q == 0 ? r : rotate_quarter(r, q);
}

}  // namespace

Raster apply_stand(const Raster& shape, const StandConfig& config,
                   const Estimator& estimator) {
  if (config.rotation != 0 && config.rotation != 90 && config.rotation != 180 &&
      config.rotation != 270) {
    throw Error("stand rotation must be one of 0, 90, 180, 270");
  }
  Raster rotated = rotate_if(shape, config.rotation);
  RollMasks masks =
      rasterize_rolls(config.profile, place_profile(config.profile), 0.0, shape.config());
  Raster out = estimator.estimate({std::move(rotated), std::move(masks.over),
                                   std::move(masks.under)});
  return rotate_if(out, (360 - config.rotation) % 360);
}

std::vector<PlanChild> expand(const Raster& shape, const Raster& target,
                              const Estimator& estimator, int n,
                              const std::optional<StandConfig>& final_config,
                              RngStream& rng, const GenConfig& gen) {
  std::vector<PlanChild> children;
  children.reserve(n + (final_config ? 1 : 0));

  const auto score_child = [&](StandConfig config) {
    try {
      Raster out = apply_stand(shape, config, estimator);
      const double score = jaccard(out, target);
      children.push_back({std::move(config), std::move(out), score});
    } catch (const Error& e) {
      std::cerr << "warning: dropped a child stand: " << e.what() << "\n";
    }
  };

  for (int i = 0; i < n; ++i) {
    StandConfig config{generate_profile(rng, gen),
                       static_cast<int>(rng.uniform_int(4)) * 90};
    for (int attempt = 0; attempt < 200; ++attempt) {
      const RollMasks masks = rasterize_rolls(
          config.profile, place_profile(config.profile), 0.0, shape.config());
      if (touches_rolls(rotate_if(shape, config.rotation), masks)) {
        break;
      }
      config = {generate_profile(rng, gen), static_cast<int>(rng.uniform_int(4)) * 90};
    }
    score_child(std::move(config));
  }
  if (final_config) {
    score_child(*final_config);
  }
  return children;
}

Plan plan(const Raster& inlet, const Raster& target, const Estimator& estimator,
          int n, int d, const std::optional<StandConfig>& final_config,
          RngStream& rng, const GenConfig& gen) {
  if (d < 1) {
    throw Error("search depth must be >= 1");
  }
  if (inlet.empty() || target.empty()) {
    throw Error("planner inlet and target must be nonempty");
  }

  struct NodeMeta {
    std::optional<StandConfig> config;
    int parent;
  };
  struct FrontierNode {
    Raster shape;
    int index;  // into metas
  };

  const std::uint64_t seed = rng.seed();
  std::vector<NodeMeta> metas;
  metas.push_back({std::nullopt, -1});
  std::vector<FrontierNode> frontier;
  frontier.push_back({inlet, 0});

  double best_score = -1.0;
  int best_index = -1;
  Raster best_shape;

  for (int level = 1; level <= d; ++level) {
    std::vector<FrontierNode> next;
    for (const FrontierNode& node : frontier) {
      if (node.shape.empty()) {
        continue;
      }
      for (PlanChild& child : expand(node.shape, target, estimator, n,
                                     final_config, rng, gen)) {
        metas.push_back({std::move(child.config), node.index});
        const int index = static_cast<int>(metas.size()) - 1;
        if (child.score > best_score) {
          best_score = child.score;
          best_index = index;
          best_shape = child.shape;
        }
        if (level < d) {
          next.push_back({std::move(child.shape), index});
        }
      }
    }
    frontier = std::move(next);
  }

  if (best_index < 0) {
    throw NoViablePlan("every candidate stand failed at every level");
  }

  Plan result;
  for (int i = best_index; i > 0; i = metas[i].parent) {
    result.steps.push_back(*metas[i].config);
  }
  std::reverse(result.steps.begin(), result.steps.end());
  result.final_shape = std::move(best_shape);
  result.score = best_score;
  result.estimator_id = estimator.id();
  result.seed = seed;
  result.n = n;
  result.d = d;
  return result;
}

Raster replay(const Plan& plan, const Raster& inlet, const Estimator& estimator) {
  if (plan.steps.empty()) {
    throw Error("cannot replay a plan with no steps");
  }
  Raster shape = inlet;
  for (const StandConfig& step : plan.steps) {
    shape = apply_stand(shape, step, estimator);
  }
  return shape;
}

}  // namespace rollpass
