#include <atomic>
#include <thread>

#include "craftagent/harness/harness.hpp"
#include "loop.hpp"

namespace craftagent {

std::vector<DualProposal> TrialRecord::duals() const {
  std::vector<DualProposal> out;
  for (const auto& it : iterations) {
    if (it.dual) out.push_back(*it.dual);
  }
  return out;
}

namespace {

struct Parsed {
  std::optional<DualProposal> dual;
  std::optional<std::string> error;
  std::optional<std::string> response2_error;
};

Parsed parse_reply(const std::string& text, const Arm& arm, const Rules& rules) {
  Parsed p;
  if (!arm.dual_prompt) {
    try {
      p.dual = parse_planner_output(text, PromptMode::conventional, rules);
    } catch (const ParseError& e) {
      p.error = e.what();
    }
    return p;
  }
  try {
    p.dual = parse_planner_output(text, PromptMode::predictive, rules);
    return p;
  } catch (const ParseError& e) {
    p.error = e.what();
  }
  if (arm.adopt == PromptMode::predictive) return p;
  // Response1 may still be usable; keep the Response2 failure as a marker.
  try {
    p.dual = parse_planner_output(text, PromptMode::conventional, rules);
    p.response2_error = std::move(p.error);
    p.error.reset();
  } catch (const ParseError& e) {
    p.error = e.what();
  }
  return p;
}

VisionInput encode_vision(const WorldState& state, const TrialConfig& config,
                          PlannerBackend& backend, std::optional<VisionOutput>& logged) {
  switch (config.arm.vision) {
    case VisionMode::none:
      return std::monostate{};
    case VisionMode::direct:
      return render_frame(state, config.perception.window, config.perception);
    case VisionMode::element_extraction: {
      const VisualFrame f = render_frame(state, config.perception.window, config.perception);
      ElementReport r = encode_elements(f, config.perception.dropout);
      logged = r;
      return r;
    }
    case VisionMode::free_description: {
      const VisualFrame f = render_frame(state, config.perception.window, config.perception);
      FreeDescription d = encode_free(f, config.goal, backend, config.perception.free_description_cap);
      logged = d;
      return d;
    }
  }
  return std::monostate{};
}

}  // namespace

void run_loop(WorldState state, const TrialConfig& config, PlannerBackend& inner,
              const Rules& rules, const PromptTemplates& templates, TrialRecord& out) {
  out.config = config;
  out.backend = inner.descriptor();
  out.rules_fingerprint = rules.fingerprint();
  out.prompt_version = templates.version;
  RecordingBackend backend(inner);
  TaskHistory history;
  MilestoneTracker tracker;
  const auto finish = [&] {
    for (const auto& m : tracker.milestones()) {
      auto it = tracker.first_hits().find(m);
      out.milestone_first_hit[m] =
          it == tracker.first_hits().end() ? std::nullopt : std::optional<int>(it->second);
    }
  };
  finish();

  const PromptMode prompt_mode = config.arm.dual_prompt ? PromptMode::predictive : PromptMode::conventional;
  for (int i = 1; i <= config.max_iterations; ++i) {
    IterationRecord rec;
    rec.iteration = i;
    try {
      const Observation obs = observe_cheat(state);
      const VisionInput vision = encode_vision(state, config, backend, rec.vision);
      const PromptBundle bundle = build_prompt(obs, vision, history, config.goal, prompt_mode, templates);
      rec.prompt_hash = bundle_hash(bundle);
      for (int attempt = 0; attempt <= config.parse_retries; ++attempt) {
        Parsed p = parse_reply(backend.propose(bundle), config.arm, rules);
        rec.dual = std::move(p.dual);
        rec.parse_error = std::move(p.error);
        rec.response2_error = std::move(p.response2_error);
        if (!rec.parse_error) break;
      }
    } catch (const TransportError& e) {
      rec.failure = std::string(to_string(e.kind())) + ": " + e.what();
      rec.exchanges = backend.drain();
      out.aborted = true;
      out.abort_reason = "iteration " + std::to_string(i) + ": " + *rec.failure;
      out.iterations.push_back(std::move(rec));
      break;
    } catch (...) {
      rec.exchanges = backend.drain();
      out.iterations.push_back(std::move(rec));
      finish();
      throw;
    }
    rec.exchanges = backend.drain();

    if (rec.parse_error) {
      rec.dual.reset();
      history.record_unparsed();
    } else {
      const Task task = adopt(*rec.dual, config.arm.adopt).task;
      rec.adopted = task;
      rec.outcome = execute_task(state, task, config.step_budget, rules);
      history.record(render_task(task), *rec.outcome);
    }
    rec.milestones_hit = tracker.update(state, i);
    out.iterations.push_back(std::move(rec));
    finish();
    if (goal_reached(state, config.goal)) {
      out.reached_goal = true;
      break;
    }
  }
  finish();
}

TrialRecord run_trial_from(WorldState start, const TrialConfig& config, PlannerBackend& backend,
                           const Rules& rules, const PromptTemplates& templates) {
  config.validate();
  TrialRecord out;
  out.fixture_start = true;
  run_loop(std::move(start), config, backend, rules, templates, out);
  return out;
}

TrialRecord run_trial(const TrialConfig& config, PlannerBackend& backend, const Rules& rules,
                      const PromptTemplates& templates) {
  config.validate();
  TrialRecord out;
  run_loop(generate_world(config.seed, config.world), config, backend, rules, templates, out);
  return out;
}

const std::vector<std::pair<std::string, std::string>>& milestone_chain() {
  static const std::vector<std::pair<std::string, std::string>> chain = {
      {"wooden_pickaxe", "stone_pickaxe"}, {"stone_pickaxe", "iron_pickaxe"},
      {"wooden_pickaxe", "furnace"},       {"furnace", "iron_pickaxe"},
      {"iron_pickaxe", "gold_ingot"},      {"gold_ingot", "golden_pickaxe"},
      {"iron_pickaxe", "golden_pickaxe"},
  };
  return chain;
}

std::vector<std::string> monotonicity_violations(const TrialRecord& record) {
  std::vector<std::string> out;
  const auto hit = [&](const std::string& m) -> std::optional<int> {
    auto it = record.milestone_first_hit.find(m);
    return it == record.milestone_first_hit.end() ? std::nullopt : it->second;
  };
  const auto show = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("censored"); };
  for (const auto& [a, b] : milestone_chain()) {
    const auto ha = hit(a);
    const auto hb = hit(b);
    if (hb && (!ha || *ha > *hb)) out.push_back(a + "@" + show(ha) + " > " + b + "@" + show(hb));
  }
  const int n = static_cast<int>(record.iterations.size());
  for (const auto& [m, v] : record.milestone_first_hit) {
    if (v && (*v < 1 || *v > record.config.max_iterations || (n > 0 && *v > n))) {
      out.push_back(m + "@" + std::to_string(*v) + " outside 1.." + std::to_string(n));
    }
  }
  return out;
}

// ---- experiments ----------------------------------------------------------

namespace {

class SharedBackend : public PlannerBackend {
 public:
  explicit SharedBackend(std::shared_ptr<PlannerBackend> inner) : inner_(std::move(inner)) {}
  std::string propose(const PromptBundle& b) override { return inner_->propose(b); }
  BackendDescriptor descriptor() const override { return inner_->descriptor(); }

 private:
  std::shared_ptr<PlannerBackend> inner_;
};

}  // namespace

BackendFactory oracle_factory(const Rules& rules) {
  return [rules](const TrialConfig&) { return std::make_unique<OracleBackend>(rules); };
}

BackendFactory http_factory(const HttpConfig& config) {
  auto shared = std::make_shared<HttpBackend>(config);
  return [shared](const TrialConfig&) { return std::make_unique<SharedBackend>(shared); };
}

std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, const BackendFactory& factory,
                                        const Rules& rules) {
  if (plan.arms.empty()) throw ConfigError("experiment needs at least one arm");
  if (plan.trials < 1) throw ConfigError("trials must be at least 1");
  std::vector<TrialConfig> jobs;
  for (const auto& base : plan.arms) {
    for (int i = 0; i < plan.trials; ++i) {
      TrialConfig c = base;
      c.seed = base.seed + static_cast<std::uint64_t>(i);
      c.trial_index = i;
      c.validate();
      jobs.push_back(std::move(c));
    }
  }
  std::vector<TrialRecord> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        auto backend = factory(jobs[k]);
        results[k] = run_trial(jobs[k], *backend, rules);
      } catch (const std::exception& e) {
        results[k].config = jobs[k];
        results[k].rules_fingerprint = rules.fingerprint();
        results[k].aborted = true;
        results[k].abort_reason = e.what();
        for (const auto& m : default_milestones()) results[k].milestone_first_hit[m] = std::nullopt;
      }
    }
  };
  const int n = std::clamp(plan.parallelism, 1, static_cast<int>(jobs.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace craftagent
