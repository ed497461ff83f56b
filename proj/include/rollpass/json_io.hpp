#pragma once

#include <filesystem>

#include "json.hpp"
#include "rollpass/planner.hpp"

namespace rollpass {

// Key order is fixed (ordered_json) so that serializations of equal values
// are byte-identical; doubles round-trip exactly through the shortest
// decimal representation.

nlohmann::ordered_json profile_to_json(const RollProfile& profile);
RollProfile profile_from_json(const nlohmann::json& j);

// {score, steps: [{profile, rotation}], estimator_id, seed, n, d}.
// final_shape is not serialized; replay the steps to recover it.
nlohmann::ordered_json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);

void save_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace rollpass
