#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "craftagent/craftworld/inventory.hpp"
#include "craftagent/craftworld/types.hpp"

namespace craftagent {

enum class Station : std::uint8_t { none, crafting_table, furnace };

std::string_view to_string(Station s);
std::optional<Station> station_from_string(std::string_view name);
BlockKind station_block(Station s);

using ItemCount = std::pair<std::string, int>;

// Inputs are ordered: planners visit them in table order. An input key may be
// an item class ("planks", "wood_log").
struct Recipe {
  std::string id;
  std::vector<ItemCount> inputs;
  std::vector<ItemCount> outputs;
  Station station = Station::none;
  int fuel_cost = 0;

  bool is_smelting() const { return station == Station::furnace; }
  bool produces(std::string_view item) const;
  int output_count(std::string_view item) const;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

struct MiningRule {
  BlockKind block = BlockKind::stone;
  std::string yield;
  int yield_count = 1;
  ToolTier min_tier = ToolTier::hand;

  friend bool operator==(const MiningRule&, const MiningRule&) = default;
};

struct PickupRule {
  std::string entity;
  std::string item;

  friend bool operator==(const PickupRule&, const PickupRule&) = default;
};

struct ToolRule {
  std::string item;
  ToolTier tier = ToolTier::hand;

  friend bool operator==(const ToolRule&, const ToolRule&) = default;
};

// The recipe, mining, fuel and tool tables. Everything the simulator and the
// planners know about the tech tree lives here.
struct Rules {
  std::vector<Recipe> recipes;
  std::vector<MiningRule> mining;
  std::vector<std::string> fuel;  // consumption order; keys may be classes
  std::vector<PickupRule> pickups;
  std::vector<ToolRule> tools;
  int station_radius = 3;

  static const Rules& defaults();

  const Recipe* find_recipe(std::string_view id) const;
  // First recipe (table order) whose output matches `item` exactly or by
  // class. For a class item, prefers a recipe whose inputs `inv` can cover.
  const Recipe* producer_of(std::string_view item, const Inventory* inv = nullptr) const;
  // First smelting recipe consuming `input`.
  const Recipe* smelting_of(std::string_view input) const;
  const MiningRule* mining_rule(BlockKind block) const;
  // Mining rule whose yield matches `item`.
  const MiningRule* source_of(std::string_view item) const;
  std::optional<ToolTier> tool_tier(std::string_view item) const;
  std::string pickaxe_for(ToolTier tier) const;
  bool is_fuel(std::string_view item) const;
  int fuel_units(const Inventory& inv) const;
  // Removes n fuel units following `fuel` order. Precondition: enough fuel.
  std::vector<ItemCount> consume_fuel(Inventory& inv, int n) const;

  // Every item name, class name and minable block name the rules mention.
  std::set<std::string, std::less<>> vocabulary() const;

  nlohmann::json to_json() const;
  static Rules from_json(const nlohmann::json& j);  // throws ConfigError
  void validate() const;                             // throws ConfigError
  // sha256 of the canonical JSON form.
  std::string fingerprint() const;

  friend bool operator==(const Rules&, const Rules&) = default;
};

// Items that appear in the world without a recipe (decorative drops etc.).
const std::vector<std::string>& extra_items();

}  // namespace craftagent
