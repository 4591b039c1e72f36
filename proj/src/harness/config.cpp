#include "craftagent/harness/harness.hpp"

namespace craftagent {

using nlohmann::json;

const std::vector<Arm>& standard_arms() {
  static const std::vector<Arm> arms = {
      {"1-1", VisionMode::direct, false, PromptMode::conventional},
      {"1-2", VisionMode::free_description, false, PromptMode::conventional},
      {"1-3", VisionMode::element_extraction, false, PromptMode::conventional},
      {"1-4", VisionMode::none, false, PromptMode::conventional},
      {"2-1", VisionMode::none, true, PromptMode::conventional},
      {"2-2", VisionMode::none, true, PromptMode::predictive},
  };
  return arms;
}

std::optional<Arm> arm_by_id(std::string_view id) {
  for (const Arm& a : standard_arms()) {
    if (a.id == id) return a;
  }
  return std::nullopt;
}

namespace {

void check_goal(const std::string& goal) {
  const Rules& rules = Rules::defaults();
  if (rules.producer_of(goal) == nullptr && rules.source_of(goal) == nullptr) {
    throw ConfigError("goal '" + goal + "' cannot be made or mined");
  }
}

json perception_json(const PerceptionConfig& p) {
  return {{"window", p.window},
          {"night_time_hidden_fraction", p.night_time_hidden_fraction},
          {"dropout", p.dropout},
          {"free_description_cap", p.free_description_cap}};
}

PerceptionConfig perception_from_json(const json& j) {
  PerceptionConfig p;
  for (const auto& [k, v] : j.items()) {
    if (k == "window") p.window = v.get<int>();
    else if (k == "night_time_hidden_fraction") p.night_time_hidden_fraction = v.get<double>();
    else if (k == "dropout") p.dropout = v.get<double>();
    else if (k == "free_description_cap") p.free_description_cap = v.get<std::size_t>();
    else throw ConfigError("unknown perception key '" + k + "'");
  }
  return p;
}

// Object merge so that partial sub-objects keep the current values.
json merged(json base, const json& patch) {
  if (!patch.is_object()) throw ConfigError("expected an object");
  for (const auto& [k, v] : patch.items()) base[k] = v;
  return base;
}

}  // namespace

void TrialConfig::validate() const {
  if (!arm_by_id(arm.id) || *arm_by_id(arm.id) != arm) throw ConfigError("unknown arm '" + arm.id + "'");
  if (backend != "oracle" && backend != "http" && backend != "playback") {
    throw ConfigError("unknown backend '" + backend + "'");
  }
  if (max_iterations < 1) throw ConfigError("cap must be at least 1");
  if (step_budget < 1) throw ConfigError("step budget must be at least 1");
  if (parse_retries < 0 || parse_retries > 5) throw ConfigError("parse_retries must be in 0..5");
  if (perception.window < 5 || perception.window % 2 == 0) throw ConfigError("window must be odd and >= 5");
  if (perception.dropout < 0.0 || perception.dropout > 1.0 ||
      perception.night_time_hidden_fraction < 0.0 || perception.night_time_hidden_fraction > 1.0) {
    throw ConfigError("perception fractions must be in [0, 1]");
  }
  check_goal(goal);
  world.validate();
}

json TrialConfig::to_json() const {
  return {{"arm", arm.id},
          {"vision_mode", to_string(arm.vision)},
          {"prompt_mode", to_string(arm.adopt)},
          {"dual_prompt", arm.dual_prompt},
          {"seed", seed},
          {"trial_index", trial_index},
          {"backend", backend},
          {"max_iterations", max_iterations},
          {"goal", goal},
          {"step_budget", step_budget},
          {"parse_retries", parse_retries},
          {"world", world.to_json()},
          {"perception", perception_json(perception)}};
}

TrialConfig TrialConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("trial config must be an object");
  TrialConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "arm") {
        auto a = arm_by_id(v.get<std::string>());
        if (!a) throw ConfigError("unknown arm '" + v.get<std::string>() + "'");
        c.arm = *a;
      } else if (k == "vision_mode" || k == "prompt_mode" || k == "dual_prompt") {
        // derived from the arm
      } else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "trial_index") c.trial_index = v.get<int>();
      else if (k == "backend") c.backend = v.get<std::string>();
      else if (k == "max_iterations") c.max_iterations = v.get<int>();
      else if (k == "goal") c.goal = v.get<std::string>();
      else if (k == "step_budget") c.step_budget = v.get<int>();
      else if (k == "parse_retries") c.parse_retries = v.get<int>();
      else if (k == "world") c.world = WorldConfig::from_json(v);
      else if (k == "perception") c.perception = perception_from_json(v);
      else throw ConfigError("unknown trial config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("trial config: ") + e.what());
  }
  c.validate();
  return c;
}

void RunSettings::apply_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "arm" || k == "arms") {
        arms.clear();
        if (v.is_array()) {
          for (const auto& a : v) arms.push_back(a.get<std::string>());
        } else {
          arms.push_back(v.get<std::string>());
        }
      } else if (k == "seed") seed = v.get<std::uint64_t>();
      else if (k == "trials") trials = v.get<int>();
      else if (k == "backend") backend = v.get<std::string>();
      else if (k == "cap") cap = v.get<int>();
      else if (k == "out_dir") out_dir = v.get<std::string>();
      else if (k == "goal") goal = v.get<std::string>();
      else if (k == "step_budget") step_budget = v.get<int>();
      else if (k == "parse_retries") parse_retries = v.get<int>();
      else if (k == "parallelism") parallelism = v.get<int>();
      else if (k == "world") world = WorldConfig::from_json(merged(world.to_json(), v));
      else if (k == "http") http = HttpConfig::from_json(merged(http.to_json(), v));
      else throw ConfigError("unknown config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void RunSettings::validate() const {
  if (arms.empty()) throw ConfigError("no arm selected");
  for (const auto& a : arms) {
    if (!arm_by_id(a)) throw ConfigError("unknown arm '" + a + "'");
  }
  if (backend != "oracle" && backend != "http") throw ConfigError("unknown backend '" + backend + "'");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (cap < 1) throw ConfigError("cap must be at least 1");
  if (parallelism < 1 || parallelism > 64) throw ConfigError("parallelism must be in 1..64");
  for (const auto& c : plan().arms) c.validate();
}

ExperimentPlan RunSettings::plan() const {
  ExperimentPlan p;
  p.trials = trials;
  p.parallelism = parallelism;
  for (const auto& id : arms) {
    TrialConfig c;
    if (auto a = arm_by_id(id)) c.arm = *a;
    else c.arm.id = id;
    c.seed = seed;
    c.backend = backend;
    c.max_iterations = cap;
    c.goal = goal;
    c.step_budget = step_budget;
    c.parse_retries = parse_retries;
    c.world = world;
    p.arms.push_back(std::move(c));
  }
  return p;
}

}  // namespace craftagent
