#pragma once

#include <utility>
#include <vector>

#include "craftagent/craftworld/actions.hpp"

namespace craftagent {

inline constexpr int kDefaultStepBudget = 600;

// Sight radius used by the executor to find stations and resources. Matches
// the cheat radius of the perception layer.
inline constexpr int kExecutorSightRadius = 8;

struct ExecutionTrace {
  std::vector<Action> actions;  // successfully applied primitives, in order
};

// Drives primitive loops for one canonical task:
//  - obtain/mine: walk to the nearest reachable source, mine, repeat, walk back
//  - craft/smelt: walk to a placed station within sight, then apply the recipe
//  - place: put a held station on a free adjacent cell
//  - explore: walk until a block of the named kind is within sight
// Never throws for infeasible tasks; the outcome carries the reason.
TaskOutcome execute_task(WorldState& state, const Task& task, int step_budget,
                         const Rules& rules = Rules::defaults(), ExecutionTrace* trace = nullptr);

std::pair<WorldState, TaskOutcome> execute_task(const WorldState& state, const Task& task,
                                                int step_budget, const Rules& rules,
                                                ExecutionTrace* trace);

bool goal_reached(const WorldState& state, std::string_view goal_item = "golden_pickaxe");

}  // namespace craftagent
