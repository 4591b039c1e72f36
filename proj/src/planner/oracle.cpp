#include <algorithm>
#include <set>

#include "craftagent/planner/planner.hpp"

namespace craftagent {

namespace {

int have(const Inventory& inv, std::string_view item) {
  return inv.count_matching(item_class(item));
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

ToolTier tier_of(const Inventory& inv, const Rules& rules) {
  ToolTier best = ToolTier::hand;
  for (const auto& [item, n] : inv.items()) {
    if (auto t = rules.tool_tier(item); t && *t > best) best = *t;
  }
  return best;
}

Task gather_task(const MiningRule& m, std::string_view item, int n) {
  if (item_class(item) == "wood_log") return {Verb::obtain, "wood_log", n};
  return {Verb::mine, std::string(to_string(m.block)), n};
}

Task make_task(const Recipe& r, std::string_view item, int deficit, int batches) {
  if (r.is_smelting()) return {Verb::smelt, item_class(r.inputs.front().first), batches};
  return {Verb::craft, item_class(item), deficit};
}

// ---- conventional ---------------------------------------------------------

std::optional<Task> first_unmet(const Rules& rules, const Inventory& inv, const std::string& item,
                                int need, int depth = 0) {
  if (depth > 24) return std::nullopt;
  const int h = have(inv, item);
  if (h >= need) return std::nullopt;
  const int deficit = need - h;
  if (const MiningRule* m = rules.source_of(item)) {
    if (tier_of(inv, rules) < m->min_tier) {
      if (auto t = first_unmet(rules, inv, rules.pickaxe_for(m->min_tier), 1, depth + 1)) return t;
    }
    return gather_task(*m, item, deficit);
  }
  const Recipe* r = rules.producer_of(item, &inv);
  if (r == nullptr) return std::nullopt;
  const int batches = ceil_div(deficit, r->output_count(item));
  for (const auto& [in, n] : r->inputs) {
    if (auto t = first_unmet(rules, inv, item_class(in), n * batches, depth + 1)) return t;
  }
  return make_task(*r, item, deficit, batches);
}

// Recipe and batch count an adopted make-task would run.
std::optional<std::pair<const Recipe*, int>> recipe_for(const Rules& rules, const Inventory& inv,
                                                        const Task& t) {
  if (t.verb == Verb::smelt) {
    if (const Recipe* r = rules.smelting_of(t.item)) return std::pair{r, t.count};
    return std::nullopt;
  }
  if (t.verb != Verb::craft) return std::nullopt;
  const Recipe* r = rules.producer_of(t.item, &inv);
  if (r == nullptr) return std::nullopt;
  return std::pair{r, ceil_div(t.count, r->output_count(t.item))};
}

std::string pretty(std::string_view item) {
  std::string s(item);
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

// ---- predictive -----------------------------------------------------------

std::string inventory_delta(const Inventory& before, const Inventory& after) {
  std::set<std::string> names;
  for (const auto& [k, n] : before.items()) names.insert(k);
  for (const auto& [k, n] : after.items()) names.insert(k);
  std::string out;
  for (const auto& k : names) {
    const int d = after.count(k) - before.count(k);
    if (d == 0) continue;
    if (!out.empty()) out += ", ";
    out += (d > 0 ? "+" : "") + std::to_string(d) + " " + k;
  }
  return out;
}

class Simulator {
 public:
  Simulator(const Rules& rules, const PromptState& st) : rules_(rules) {
    for (const auto& [item, n] : st.inventory.items()) inv_.add(item_class(item), n);
    for (const auto& b : st.nearby_blocks) {
      if (auto s = station_from_string(b); s && *s != Station::none) placed_.insert(b);
    }
  }

  void need(const std::string& raw, int count) {
    const std::string item = item_class(raw);
    while (have(inv_, item) < count) {
      tick();
      const int deficit = count - have(inv_, item);
      if (const MiningRule* m = rules_.source_of(item)) {
        ensure_tier(m->min_tier);
        const Inventory before = inv_;
        inv_.add(item_class(m->yield), deficit);
        const Task t = gather_task(*m, item, deficit);
        emit(t, before, gather_risk(*m));
        continue;
      }
      const Recipe* r = rules_.producer_of(item, &inv_);
      if (r == nullptr) throw std::logic_error("no way to obtain " + item);
      make(*r, item, deficit, ceil_div(deficit, r->output_count(item)));
    }
  }

  PredictionPlan take() { return std::move(plan_); }

 private:
  void tick() {
    if (++guard_ > 2000) throw std::logic_error("planner did not converge");
  }

  void ensure_tier(ToolTier t) {
    if (tier_of(inv_, rules_) < t) need(rules_.pickaxe_for(t), 1);
  }

  bool ready(const Recipe& r, int batches) const {
    for (const auto& [in, n] : r.inputs) {
      if (have(inv_, in) < n * batches) return false;
    }
    if (r.station != Station::none && !placed_.contains(std::string(to_string(r.station)))) {
      return false;
    }
    return rules_.fuel_units(inv_) >= r.fuel_cost * batches;
  }

  void make(const Recipe& r, const std::string& item, int deficit, int batches) {
    const int fuel = r.fuel_cost * batches;
    while (!ready(r, batches)) {
      tick();
      for (const auto& [in, n] : r.inputs) need(in, n * batches);
      if (r.station != Station::none) {
        const std::string station(to_string(r.station));
        if (!placed_.contains(station)) {
          need(station, 1);
          const Inventory before = inv_;
          inv_.remove(station, 1);
          placed_.insert(station);
          emit({Verb::place, station, 1}, before, "needs a free cell next to the player",
               station + " placed nearby");
        }
      }
      if (const int units = rules_.fuel_units(inv_); units < fuel) {
        need("planks", have(inv_, "planks") + (fuel - units));
      }
    }
    const Inventory before = inv_;
    for (const auto& [in, n] : r.inputs) inv_.remove_matching(item_class(in), n * batches);
    rules_.consume_fuel(inv_, fuel);
    for (const auto& [out, n] : r.outputs) inv_.add(item_class(out), n * batches);
    std::string risk;
    if (r.station == Station::none) {
      risk = "needs every ingredient in the inventory";
    } else if (r.is_smelting()) {
      risk = "needs a placed furnace within reach and " + std::to_string(fuel) + " fuel";
    } else {
      risk = "needs a placed " + std::string(to_string(r.station)) +
             " within reach and every ingredient";
    }
    emit(make_task(r, item, deficit, batches), before, risk);
  }

  std::string gather_risk(const MiningRule& m) const {
    const std::string target = is_log(m.block) ? "tree" : pretty(to_string(m.block));
    std::string risk = "the nearest " + target + " may be far away";
    if (m.min_tier != ToolTier::hand) {
      const std::string tier(to_string(m.min_tier));
      risk += std::string("; needs ") + (tier == "iron" ? "an " : "a ") + tier + " pickaxe or better";
    }
    return risk;
  }

  void emit(const Task& t, const Inventory& before, std::string risk, std::string extra = {}) {
    std::string delta = inventory_delta(before, inv_);
    if (!extra.empty()) delta += (delta.empty() ? "" : "; ") + extra;
    plan_.steps.push_back(t);
    plan_.predicted_state_changes.push_back(delta.empty() ? "no change" : delta);
    plan_.risks.push_back(std::move(risk));
  }

  const Rules& rules_;
  Inventory inv_;
  std::set<std::string> placed_;
  PredictionPlan plan_;
  int guard_ = 0;
};

std::string goal_from_vision_prompt(std::string_view text) {
  const auto at = text.find("create ");
  if (at == std::string_view::npos) return "golden_pickaxe";
  std::string_view rest = text.substr(at + 7);
  rest = rest.substr(0, rest.find('.'));
  try {
    return parse_task("craft " + std::string(rest)).item;
  } catch (const ParseError&) {
    return "golden_pickaxe";
  }
}

}  // namespace

TaskProposal oracle_conventional(const PromptState& st, const Rules& rules) {
  const Inventory& inv = st.inventory;
  Task t = first_unmet(rules, inv, st.goal, 1).value_or(Task{Verb::craft, st.goal, 1});
  std::string reasoning = "The final goal is " + pretty(st.goal) +
                          ". Working back through its recipe from my inventory, the first thing "
                          "to do is this.";
  if (st.last && !st.last->success && st.last->task == render_task(t)) {
    const auto rb = recipe_for(rules, inv, t);
    const std::string& why = st.last->reason;
    if (rb && why == "no_station_placed" && rb->first->station != Station::none) {
      const std::string station(to_string(rb->first->station));
      if (inv.count(station) >= 1) {
        t = {Verb::place, station, 1};
      } else {
        t = first_unmet(rules, inv, station, 1).value_or(Task{Verb::craft, station, 1});
      }
      reasoning = "The last attempt failed because no " + pretty(station) +
                  " was placed, so that comes first.";
    } else if (rb && why == "missing_ingredients" && rb->first->fuel_cost > 0) {
      const int short_by = rb->first->fuel_cost * rb->second - rules.fuel_units(inv);
      if (short_by > 0) {
        t = first_unmet(rules, inv, "planks", have(inv, "planks") + short_by)
                .value_or(Task{Verb::craft, "planks", short_by});
        reasoning = "The last attempt ran out of fuel, so gather fuel first.";
      }
    }
  }
  return {std::move(reasoning), std::move(t)};
}

PredictiveProposal oracle_predictive(const PromptState& st, const Rules& rules) {
  Simulator sim(rules, st);
  sim.need(st.goal, 1);
  PredictiveProposal out;
  out.plan = sim.take();
  out.proposal.task = out.plan.steps.empty() ? Task{Verb::craft, st.goal, 1} : out.plan.steps.front();
  out.proposal.reasoning = "Predicting " + std::to_string(out.plan.steps.size()) +
                           " steps to " + pretty(st.goal) +
                           "; the first one can be carried out with what I have now.";
  return out;
}

PromptState prompt_state_of(const Observation& obs, std::string_view goal) {
  PromptState st;
  st.inventory = obs.inventory;
  for (const auto& b : obs.nearby_blocks) st.nearby_blocks.insert(std::string(to_string(b.kind)));
  st.equipment = obs.equipment;
  st.goal = std::string(goal);
  return st;
}

std::string OracleBackend::propose(const PromptBundle& bundle) {
  if (bundle.purpose == PromptPurpose::vision_description) {
    if (!bundle.attachment) return "N/A";
    return free_description_template(encode_elements(*bundle.attachment),
                                     goal_from_vision_prompt(bundle.user_text), rules_);
  }
  const PromptState st = read_prompt_state(bundle.user_text);
  const TaskProposal r1 = oracle_conventional(st, rules_);
  if (bundle.mode == PromptMode::conventional) return render_response(r1);
  return render_dual(r1, oracle_predictive(st, rules_));
}

}  // namespace craftagent
