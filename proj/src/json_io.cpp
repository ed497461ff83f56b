#include "rollpass/json_io.hpp"

#include <fstream>

namespace rollpass {

namespace {

nlohmann::ordered_json knots_to_json(const ProfileCurve& curve) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const Point2& p : curve.knots()) {
    out.push_back({p.x, p.y});
  }
  return out;
}

std::vector<Point2> knots_from_json(const nlohmann::json& j) {
  std::vector<Point2> knots;
  knots.reserve(j.size());
  for (const auto& p : j) {
    knots.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return knots;
}

}  // namespace

nlohmann::ordered_json profile_to_json(const RollProfile& profile) {
  nlohmann::ordered_json j;
  j["over_knots"] = knots_to_json(profile.over());
  j["under_knots"] = knots_to_json(profile.under());
  j["width"] = profile.width();
  return j;
}

RollProfile profile_from_json(const nlohmann::json& j) {
  return RollProfile(fit_profile_curve(knots_from_json(j.at("over_knots"))),
                     fit_profile_curve(knots_from_json(j.at("under_knots"))),
                     j.at("width").get<double>());
}

nlohmann::ordered_json plan_to_json(const Plan& plan) {
  nlohmann::ordered_json j;
  j["score"] = plan.score;
  j["steps"] = nlohmann::ordered_json::array();
  for (const StandConfig& step : plan.steps) {
    nlohmann::ordered_json s;
    s["profile"] = profile_to_json(step.profile);
    s["rotation"] = step.rotation;
    j["steps"].push_back(std::move(s));
  }
  j["estimator_id"] = plan.estimator_id;
  j["seed"] = plan.seed;
  j["n"] = plan.n;
  j["d"] = plan.d;
  return j;
}

Plan plan_from_json(const nlohmann::json& j) {
  Plan plan;
  for (const auto& s : j.at("steps")) {
    plan.steps.push_back(
        {profile_from_json(s.at("profile")), s.at("rotation").get<int>()});
  }
  plan.score = j.at("score").get<double>();
  plan.estimator_id = j.at("estimator_id").get<std::string>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.n = j.at("n").get<int>();
  plan.d = j.at("d").get<int>();
  return plan;
}

void save_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace rollpass
