#include "craftagent/craftworld/actions.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <tuple>

namespace craftagent {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

StepResult fail(StepStatus s) {
  StepResult r;
  r.status = s;
  return r;
}

// Fixed probe order for placing a station: facing cell first, then the ring.
constexpr std::array<Pos, 8> kPlaceRing = {Pos{0, -1}, Pos{1, 0},  Pos{0, 1},  Pos{-1, 0},
                                           Pos{1, -1}, Pos{1, 1},  Pos{-1, 1}, Pos{-1, -1}};

bool cell_free(const WorldState& s, Pos p) { return s.in_bounds(p) && s.at(p) == BlockKind::ground; }

StepResult do_move(WorldState& s, const action::Move& m, const Rules& rules) {
  const Pos to = step_towards(s.player, m.dir);
  if (!s.in_bounds(to)) return fail(StepStatus::out_of_bounds);
  if (!is_walkable(s.at(to))) return fail(StepStatus::blocked);
  StepResult r;
  s.player = to;
  s.facing = m.dir;
  for (auto it = s.entities.begin(); it != s.entities.end();) {
    if (it->pos != to) {
      ++it;
      continue;
    }
    const auto rule = std::find_if(rules.pickups.begin(), rules.pickups.end(),
                                   [&](const PickupRule& p) { return p.entity == it->kind; });
    if (rule == rules.pickups.end() || !s.inventory.add(rule->item, 1)) {
      ++it;
      continue;
    }
    r.rule = RuleKind::pickup;
    r.rule_id = it->kind;
    r.produced.emplace_back(rule->item, 1);
    it = s.entities.erase(it);
  }
  return r;
}

StepResult do_mine(WorldState& s, const action::Mine& m, const Rules& rules) {
  if (!s.in_bounds(m.target)) return fail(StepStatus::out_of_bounds);
  if (chebyshev(s.player, m.target) != 1) return fail(StepStatus::not_adjacent);
  const MiningRule* rule = rules.mining_rule(s.at(m.target));
  if (rule == nullptr) return fail(StepStatus::not_minable);
  if (equipped_tier(s, rules) < rule->min_tier) return fail(StepStatus::tool_tier_too_low);
  if (!s.inventory.add(rule->yield, rule->yield_count)) return fail(StepStatus::inventory_full);
  s.set(m.target, BlockKind::ground);
  StepResult r;
  r.rule = RuleKind::mining;
  r.rule_id = rule->yield;
  r.produced.emplace_back(rule->yield, rule->yield_count);
  return r;
}

StepResult apply_recipe(WorldState& s, const Recipe& recipe, int batches, const Rules& rules) {
  const Feasibility f = can_craft(s, recipe.id, rules, batches);
  if (!f.feasible) {
    const bool station_missing =
        std::any_of(f.missing.begin(), f.missing.end(),
                    [](const Requirement& q) { return q.kind == Requirement::Kind::station; });
    return fail(station_missing ? StepStatus::no_station_placed : StepStatus::missing_ingredients);
  }
  Inventory inv = s.inventory;
  StepResult r;
  for (const auto& [key, n] : recipe.inputs) {
    auto taken = inv.remove_matching(key, n * batches);
    r.consumed.insert(r.consumed.end(), taken.begin(), taken.end());
  }
  if (recipe.fuel_cost > 0) {
    auto taken = rules.consume_fuel(inv, recipe.fuel_cost * batches);
    r.consumed.insert(r.consumed.end(), taken.begin(), taken.end());
  }
  for (const auto& [item, n] : recipe.outputs) {
    if (!inv.add(item, n * batches)) return fail(StepStatus::inventory_full);
    r.produced.emplace_back(item, n * batches);
  }
  s.inventory = std::move(inv);
  r.rule = recipe.is_smelting() ? RuleKind::smelt : RuleKind::recipe;
  r.rule_id = recipe.id;
  return r;
}

StepResult do_craft(WorldState& s, const action::Craft& c, const Rules& rules) {
  const Recipe* recipe = rules.find_recipe(c.recipe_id);
  if (recipe == nullptr || recipe->is_smelting()) return fail(StepStatus::unknown_recipe);
  return apply_recipe(s, *recipe, 1, rules);
}

StepResult do_smelt(WorldState& s, const action::Smelt& sm, const Rules& rules) {
  const Recipe* recipe = rules.smelting_of(sm.item);
  if (recipe == nullptr || sm.count < 1) return fail(StepStatus::unknown_recipe);
  return apply_recipe(s, *recipe, sm.count, rules);
}

StepResult do_place(WorldState& s, const action::Place& p) {
  const auto station = station_from_string(p.station);
  if (!station || *station == Station::none) return fail(StepStatus::unknown_recipe);
  if (s.inventory.count(p.station) < 1) return fail(StepStatus::missing_ingredients);
  Pos target = step_towards(s.player, s.facing);
  if (!cell_free(s, target)) {
    const auto it = std::find_if(kPlaceRing.begin(), kPlaceRing.end(), [&](Pos d) {
      return cell_free(s, {s.player.x + d.x, s.player.y + d.y});
    });
    if (it == kPlaceRing.end()) return fail(StepStatus::no_free_cell);
    target = {s.player.x + it->x, s.player.y + it->y};
  }
  s.inventory.remove(p.station, 1);
  s.set(target, station_block(*station));
  s.placed_stations.insert(target);
  StepResult r;
  r.rule = RuleKind::placement;
  r.rule_id = p.station;
  r.consumed.emplace_back(p.station, 1);
  return r;
}

}  // namespace

std::string describe(const Action& a) {
  return std::visit(
      Overloaded{
          [](const action::Move& m) { return "move " + std::string(to_string(m.dir)); },
          [](const action::Mine& m) {
            return "mine " + std::to_string(m.target.x) + "," + std::to_string(m.target.y);
          },
          [](const action::Craft& c) { return "craft " + c.recipe_id; },
          [](const action::Smelt& sm) { return "smelt " + sm.item + " x" + std::to_string(sm.count); },
          [](const action::Place& p) { return "place " + p.station; },
          [](const action::Wait&) { return std::string("wait"); },
      },
      a);
}

std::string_view to_string(StepStatus s) {
  constexpr std::array<std::string_view, 11> names = {
      "ok",          "out_of_bounds",     "blocked",        "not_adjacent",
      "not_minable", "tool_tier_too_low", "missing_ingredients", "no_station_placed",
      "inventory_full", "unknown_recipe", "no_free_cell",
  };
  return names[static_cast<std::size_t>(s)];
}

StepResult step(WorldState& state, const Action& a, const Rules& rules) {
  StepResult r = std::visit(
      Overloaded{
          [&](const action::Move& m) { return do_move(state, m, rules); },
          [&](const action::Mine& m) { return do_mine(state, m, rules); },
          [&](const action::Craft& c) { return do_craft(state, c, rules); },
          [&](const action::Smelt& sm) { return do_smelt(state, sm, rules); },
          [&](const action::Place& p) { return do_place(state, p); },
          [&](const action::Wait&) { return StepResult{}; },
      },
      a);
  if (r.ok()) {
    ++state.tick;
    state.time_of_day = time_for_tick(state.tick);
    state.equipped = best_tool(state.inventory, rules);
  }
  return r;
}

std::pair<WorldState, StepResult> apply_primitive(const WorldState& state, const Action& a,
                                                  const Rules& rules) {
  WorldState next = state;
  StepResult r = step(next, a, rules);
  return {std::move(next), std::move(r)};
}

std::string to_string(const Requirement& r) {
  switch (r.kind) {
    case Requirement::Kind::item:
      return r.what + " x" + std::to_string(r.count);
    case Requirement::Kind::fuel:
      return "fuel x" + std::to_string(r.count);
    case Requirement::Kind::station:
      return "station " + r.what + " not placed";
  }
  return r.what;
}

bool station_within(const WorldState& state, Station s, int radius) {
  if (s == Station::none) return true;
  const BlockKind want = station_block(s);
  return std::any_of(state.placed_stations.begin(), state.placed_stations.end(), [&](Pos p) {
    return state.at(p) == want && chebyshev(p, state.player) <= radius;
  });
}

Feasibility can_craft(const WorldState& state, std::string_view recipe_id, const Rules& rules,
                      int batches) {
  const Recipe* recipe = rules.find_recipe(recipe_id);
  if (recipe == nullptr) throw std::invalid_argument("unknown recipe id: " + std::string(recipe_id));
  Feasibility f;
  Inventory after = state.inventory;
  for (const auto& [key, n] : recipe->inputs) {
    const int need = n * batches;
    const int have = after.count_matching(key);
    if (have < need) {
      f.missing.push_back({Requirement::Kind::item, key, need - have});
      if (have > 0) after.remove_matching(key, have);
    } else {
      after.remove_matching(key, need);
    }
  }
  if (recipe->fuel_cost > 0) {
    const int need = recipe->fuel_cost * batches;
    const int have = rules.fuel_units(after);
    if (have < need) f.missing.push_back({Requirement::Kind::fuel, "fuel", need - have});
  }
  if (!station_within(state, recipe->station, rules.station_radius)) {
    f.missing.push_back({Requirement::Kind::station, std::string(to_string(recipe->station)), 1});
  }
  f.feasible = f.missing.empty();
  return f;
}

std::vector<BlockSighting> nearby_blocks(const WorldState& state, int radius) {
  if (radius < 1) throw std::invalid_argument("radius must be >= 1");
  std::vector<BlockSighting> out;
  for (int y = state.player.y - radius; y <= state.player.y + radius; ++y) {
    for (int x = state.player.x - radius; x <= state.player.x + radius; ++x) {
      const Pos p{x, y};
      if (!state.in_bounds(p)) continue;
      const BlockKind k = state.at(p);
      if (k == BlockKind::ground || k == BlockKind::unknown) continue;
      out.push_back({k, p});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Entity> nearby_entities(const WorldState& state, int radius) {
  std::vector<Entity> out;
  for (const auto& e : state.entities) {
    if (chebyshev(e.pos, state.player) <= radius) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) {
    return std::tie(a.kind, a.pos) < std::tie(b.kind, b.pos);
  });
  return out;
}

std::string best_tool(const Inventory& inv, const Rules& rules) {
  const ToolRule* best = nullptr;
  for (const auto& t : rules.tools) {
    if (inv.count(t.item) < 1) continue;
    if (best == nullptr || t.tier > best->tier) best = &t;
  }
  return best ? best->item : std::string{};
}

void sync_equipment(WorldState& state, const Rules& rules) {
  state.equipped = best_tool(state.inventory, rules);
}

ToolTier equipped_tier(const WorldState& state, const Rules& rules) {
  if (state.equipped.empty()) return ToolTier::hand;
  return rules.tool_tier(state.equipped).value_or(ToolTier::hand);
}

}  // namespace craftagent
