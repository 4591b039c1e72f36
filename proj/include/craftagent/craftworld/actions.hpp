#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "craftagent/craftworld/rules.hpp"
#include "craftagent/craftworld/world.hpp"

namespace craftagent {

namespace action {
struct Move {
  Direction dir;
};
struct Mine {
  Pos target;
};
struct Craft {
  std::string recipe_id;
};
struct Smelt {
  std::string item;
  int count = 1;
};
struct Place {
  std::string station;
};
struct Wait {};
}  // namespace action

using Action = std::variant<action::Move, action::Mine, action::Craft, action::Smelt, action::Place,
                            action::Wait>;

std::string describe(const Action& a);

enum class StepStatus : std::uint8_t {
  ok,
  out_of_bounds,
  blocked,
  not_adjacent,
  not_minable,
  tool_tier_too_low,
  missing_ingredients,
  no_station_placed,
  inventory_full,
  unknown_recipe,
  no_free_cell,
};

std::string_view to_string(StepStatus s);

// Which table entry justified an inventory change.
enum class RuleKind : std::uint8_t { none, recipe, smelt, mining, pickup, placement };

struct StepResult {
  StepStatus status = StepStatus::ok;
  RuleKind rule = RuleKind::none;
  std::string rule_id;  // recipe id, yield item, entity kind or station
  std::vector<ItemCount> consumed;
  std::vector<ItemCount> produced;

  bool ok() const { return status == StepStatus::ok; }
};

// In-place transition. A failed primitive leaves the state untouched; a
// successful one advances the tick.
StepResult step(WorldState& state, const Action& a, const Rules& rules = Rules::defaults());

// Pure form of `step`.
std::pair<WorldState, StepResult> apply_primitive(const WorldState& state, const Action& a,
                                                  const Rules& rules = Rules::defaults());

struct Requirement {
  enum class Kind : std::uint8_t { item, station, fuel } kind = Kind::item;
  std::string what;  // item key, station name, or "fuel"
  int count = 0;     // shortfall

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

std::string to_string(const Requirement& r);

struct Feasibility {
  bool feasible = false;
  std::vector<Requirement> missing;
};

// Inputs (and fuel) held for `batches` applications, and the required station
// placed within rules.station_radius. Throws ConfigError on unknown id.
Feasibility can_craft(const WorldState& state, std::string_view recipe_id,
                      const Rules& rules = Rules::defaults(), int batches = 1);

bool station_within(const WorldState& state, Station s, int radius);

struct BlockSighting {
  BlockKind kind;
  Pos pos;

  friend auto operator<=>(const BlockSighting&, const BlockSighting&) = default;
  friend bool operator==(const BlockSighting&, const BlockSighting&) = default;
};

// Every non-ground, non-unknown block within Chebyshev `radius` of the player,
// sorted by (kind, position). Throws std::invalid_argument if radius < 1.
std::vector<BlockSighting> nearby_blocks(const WorldState& state, int radius);

std::vector<Entity> nearby_entities(const WorldState& state, int radius);

// Best pickaxe held (by tier), or empty.
std::string best_tool(const Inventory& inv, const Rules& rules);
ToolTier equipped_tier(const WorldState& state, const Rules& rules);

// Re-derives `equipped` from the inventory; fixtures call this after editing
// the inventory by hand.
void sync_equipment(WorldState& state, const Rules& rules = Rules::defaults());

}  // namespace craftagent
