#include "craftagent/craftworld/executor.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <optional>

namespace craftagent {

namespace {

constexpr std::array<Direction, 4> kDirs = {Direction::north, Direction::east, Direction::south,
                                            Direction::west};

// BFS over walkable cells from the player. Returns the move sequence to the
// nearest cell satisfying `goal` (possibly empty), or nullopt.
std::optional<std::vector<Direction>> path_to(const WorldState& s,
                                              const std::function<bool(Pos)>& goal) {
  if (goal(s.player)) return std::vector<Direction>{};
  const auto idx = [&](Pos p) { return static_cast<std::size_t>(p.y) * s.width + p.x; };
  std::vector<int> parent(s.grid.size(), -1);
  std::vector<bool> seen(s.grid.size(), false);
  std::deque<Pos> queue{s.player};
  seen[idx(s.player)] = true;
  while (!queue.empty()) {
    const Pos p = queue.front();
    queue.pop_front();
    for (Direction d : kDirs) {
      const Pos q = step_towards(p, d);
      if (!s.in_bounds(q) || seen[idx(q)] || !is_walkable(s.at(q))) continue;
      seen[idx(q)] = true;
      parent[idx(q)] = static_cast<int>(d);
      if (goal(q)) {
        std::vector<Direction> moves;
        for (Pos c = q; c != s.player;) {
          const auto dir = static_cast<Direction>(parent[idx(c)]);
          moves.push_back(dir);
          const Direction back = static_cast<Direction>((static_cast<int>(dir) + 2) % 4);
          c = step_towards(c, back);
        }
        std::reverse(moves.begin(), moves.end());
        return moves;
      }
      queue.push_back(q);
    }
  }
  return std::nullopt;
}

std::optional<Pos> adjacent_target(const WorldState& s, Pos from,
                                   const std::function<bool(BlockKind)>& want) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const Pos q{from.x + dx, from.y + dy};
      if ((dx != 0 || dy != 0) && s.in_bounds(q) && want(s.at(q))) return q;
    }
  }
  return std::nullopt;
}

class Runner {
 public:
  Runner(WorldState& s, int budget, const Rules& rules, ExecutionTrace* trace)
      : s_(s), budget_(budget), rules_(rules), trace_(trace) {}

  int used() const { return used_; }
  bool exhausted() const { return used_ >= budget_; }

  // Applies one primitive; nullopt on success.
  std::optional<StepStatus> apply(const Action& a) {
    if (exhausted()) return StepStatus::blocked;
    const StepResult r = step(s_, a, rules_);
    if (!r.ok()) return r.status;
    ++used_;
    if (trace_ != nullptr) trace_->actions.push_back(a);
    return std::nullopt;
  }

  bool walk(const std::vector<Direction>& moves) {
    for (Direction d : moves) {
      if (apply(action::Move{d})) return false;
    }
    return true;
  }

  TaskOutcome done() const { return TaskOutcome::done(used_); }
  TaskOutcome failed(OutcomeReason why) const { return TaskOutcome::failed(why, used_); }

  WorldState& state() { return s_; }
  const Rules& rules() const { return rules_; }

 private:
  WorldState& s_;
  int budget_;
  int used_ = 0;
  const Rules& rules_;
  ExecutionTrace* trace_;
};

std::function<bool(BlockKind)> block_predicate(const Rules& rules, std::string_view item) {
  if (item == "wood_log") return [](BlockKind k) { return is_log(k); };
  if (auto kind = block_kind_from_string(item); kind && rules.mining_rule(*kind) != nullptr) {
    return [k = *kind](BlockKind b) { return b == k; };
  }
  std::vector<BlockKind> kinds;
  for (const auto& m : rules.mining) {
    if (key_matches(item, m.yield)) kinds.push_back(m.block);
  }
  if (kinds.empty()) return {};
  return [kinds](BlockKind b) { return std::find(kinds.begin(), kinds.end(), b) != kinds.end(); };
}

TaskOutcome gather(Runner& run, std::function<bool(BlockKind)> want, int count) {
  WorldState& s = run.state();
  const Rules& rules = run.rules();
  ToolTier needed = ToolTier::iron;
  bool any_rule = false;
  for (const auto& m : rules.mining) {
    if (want(m.block)) {
      needed = any_rule ? std::min(needed, m.min_tier) : m.min_tier;
      any_rule = true;
    }
  }
  if (!any_rule) return run.failed(OutcomeReason::target_not_found);
  if (equipped_tier(s, rules) < needed) return run.failed(OutcomeReason::tool_tier_too_low);
  const auto minable = [&](BlockKind b) {
    const MiningRule* m = rules.mining_rule(b);
    return want(b) && m != nullptr && m->min_tier <= equipped_tier(s, rules);
  };

  const Pos home = s.player;
  for (int collected = 0; collected < count; ++collected) {
    const auto path = path_to(s, [&](Pos p) { return adjacent_target(s, p, minable).has_value(); });
    if (!path) return run.failed(OutcomeReason::target_not_found);
    if (!run.walk(*path)) return run.failed(OutcomeReason::step_budget_exhausted);
    const Pos target = *adjacent_target(s, s.player, minable);
    if (run.apply(action::Mine{target})) return run.failed(OutcomeReason::step_budget_exhausted);
  }
  const auto back = path_to(s, [&](Pos p) { return p == home; });
  if (back && !run.walk(*back)) return run.failed(OutcomeReason::step_budget_exhausted);
  return run.done();
}

// Moves that bring the player within station range of a placed station in
// sight: empty when already in range, nullopt when no station is usable.
std::optional<std::vector<Direction>> station_path(const WorldState& s, Station station,
                                                   const Rules& rules) {
  if (station_within(s, station, rules.station_radius)) return std::vector<Direction>{};
  const BlockKind want = station_block(station);
  std::vector<Pos> visible;
  for (Pos p : s.placed_stations) {
    if (s.at(p) == want && chebyshev(p, s.player) <= kExecutorSightRadius) visible.push_back(p);
  }
  if (visible.empty()) return std::nullopt;
  return path_to(s, [&](Pos c) {
    return std::any_of(visible.begin(), visible.end(),
                       [&](Pos st) { return chebyshev(st, c) <= rules.station_radius; });
  });
}

TaskOutcome craft_with_recipe(Runner& run, const Recipe& recipe, int batches) {
  WorldState& s = run.state();
  const Rules& rules = run.rules();
  const auto approach = station_path(s, recipe.station, rules);
  if (!approach) return run.failed(OutcomeReason::no_station_placed);
  // Inputs and fuel only; distance to the station is handled by `approach`.
  Feasibility f = can_craft(s, recipe.id, rules, batches);
  std::erase_if(f.missing,
                [](const Requirement& q) { return q.kind == Requirement::Kind::station; });
  if (!f.missing.empty()) return run.failed(OutcomeReason::missing_ingredients);
  if (!run.walk(*approach)) return run.failed(OutcomeReason::step_budget_exhausted);

  if (recipe.is_smelting()) {
    if (run.apply(action::Smelt{recipe.inputs.front().first, batches})) {
      return run.failed(OutcomeReason::step_budget_exhausted);
    }
    return run.done();
  }
  for (int i = 0; i < batches; ++i) {
    if (run.apply(action::Craft{recipe.id})) return run.failed(OutcomeReason::step_budget_exhausted);
  }
  return run.done();
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

TaskOutcome craft(Runner& run, std::string_view item, int count) {
  const Rules& rules = run.rules();
  const Recipe* recipe = rules.producer_of(item, &run.state().inventory);
  if (recipe == nullptr) return run.failed(OutcomeReason::missing_ingredients);
  const int batches = ceil_div(count, recipe->output_count(item));
  if (batches == 1 || can_craft(run.state(), recipe->id, rules, batches).feasible) {
    return craft_with_recipe(run, *recipe, batches);
  }
  // Mixed species: one batch at a time, re-picking the recipe each time.
  for (int b = 0; b < batches; ++b) {
    const Recipe* r = rules.producer_of(item, &run.state().inventory);
    const TaskOutcome out = craft_with_recipe(run, *r, 1);
    if (!out.success) return out;
  }
  return run.done();
}

TaskOutcome smelt(Runner& run, std::string_view item, int count) {
  const Rules& rules = run.rules();
  const Recipe* recipe = rules.smelting_of(item);
  if (recipe == nullptr) {
    // "Smelt 3 gold ingots" names the product rather than the input.
    const Recipe* producer = rules.producer_of(item);
    if (producer == nullptr || !producer->is_smelting()) {
      return run.failed(OutcomeReason::missing_ingredients);
    }
    return craft_with_recipe(run, *producer, ceil_div(count, producer->output_count(item)));
  }
  return craft_with_recipe(run, *recipe, count);
}

TaskOutcome place(Runner& run, const std::string& item) {
  const auto station = station_from_string(item);
  if (!station || *station == Station::none) return run.failed(OutcomeReason::target_not_found);
  if (run.state().inventory.count(item) < 1) return run.failed(OutcomeReason::missing_ingredients);
  if (auto err = run.apply(action::Place{item})) {
    return run.failed(*err == StepStatus::no_free_cell ? OutcomeReason::target_not_found
                                                       : OutcomeReason::step_budget_exhausted);
  }
  return run.done();
}

TaskOutcome explore(Runner& run, std::string_view item) {
  const auto want = block_predicate(run.rules(), item);
  const auto kind = block_kind_from_string(item);
  std::function<bool(BlockKind)> pred = want;
  if (!pred && kind) pred = [k = *kind](BlockKind b) { return b == k; };
  if (!pred) return run.failed(OutcomeReason::target_not_found);
  WorldState& s = run.state();
  const auto sees = [&](Pos c) {
    for (int y = c.y - kExecutorSightRadius; y <= c.y + kExecutorSightRadius; ++y) {
      for (int x = c.x - kExecutorSightRadius; x <= c.x + kExecutorSightRadius; ++x) {
        if (s.in_bounds({x, y}) && pred(s.at({x, y}))) return true;
      }
    }
    return false;
  };
  const auto path = path_to(s, sees);
  if (!path) return run.failed(OutcomeReason::target_not_found);
  if (!run.walk(*path)) return run.failed(OutcomeReason::step_budget_exhausted);
  return run.done();
}

}  // namespace

TaskOutcome execute_task(WorldState& state, const Task& task, int step_budget, const Rules& rules,
                         ExecutionTrace* trace) {
  Runner run(state, std::max(step_budget, 0), rules, trace);
  if (task.count < 1 || step_budget < 1) return run.failed(OutcomeReason::step_budget_exhausted);
  switch (task.verb) {
    case Verb::obtain:
    case Verb::mine: {
      if (auto want = block_predicate(rules, task.item)) return gather(run, want, task.count);
      if (task.verb == Verb::obtain && rules.producer_of(task.item) != nullptr) {
        return craft(run, task.item, task.count);
      }
      return run.failed(OutcomeReason::target_not_found);
    }
    case Verb::craft:
      return craft(run, task.item, task.count);
    case Verb::smelt:
      return smelt(run, task.item, task.count);
    case Verb::place:
      return place(run, task.item);
    case Verb::explore:
      return explore(run, task.item);
  }
  return run.failed(OutcomeReason::target_not_found);
}

std::pair<WorldState, TaskOutcome> execute_task(const WorldState& state, const Task& task,
                                                int step_budget, const Rules& rules,
                                                ExecutionTrace* trace) {
  WorldState next = state;
  TaskOutcome out = execute_task(next, task, step_budget, rules, trace);
  return {std::move(next), out};
}

bool goal_reached(const WorldState& state, std::string_view goal_item) {
  return state.inventory.count(goal_item) >= 1;
}

}  // namespace craftagent
