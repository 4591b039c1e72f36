#include "craftagent/craftworld/types.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

namespace craftagent {

namespace {

constexpr std::array<std::string_view, kBlockKindCount> kBlockNames = {
    "ground",   "oak_log",  "spruce_log", "birch_log", "stone",          "iron_ore",
    "gold_ore", "coal_ore", "water",      "crafting_table", "furnace", "unknown",
};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 4> kBiomeNames = {"forest", "taiga", "plains", "mountains"};
constexpr std::array<std::string_view, 4> kTierNames = {"hand", "wooden", "stone", "iron"};
constexpr std::array<std::string_view, 6> kVerbNames = {"obtain", "mine",  "craft",
                                                        "smelt",  "place", "explore"};
constexpr std::array<std::string_view, 6> kReasonNames = {
    "completed",        "no_station_placed", "missing_ingredients",
    "tool_tier_too_low", "target_not_found", "step_budget_exhausted",
};

}  // namespace

std::string_view to_string(BlockKind kind) { return kBlockNames[static_cast<std::size_t>(kind)]; }

std::optional<BlockKind> block_kind_from_string(std::string_view name) {
  return lookup<BlockKind>(kBlockNames, name);
}

bool is_opaque(BlockKind kind) {
  switch (kind) {
    case BlockKind::ground:
    case BlockKind::water:
    case BlockKind::unknown:
      return false;
    default:
      return true;
  }
}

bool is_walkable(BlockKind kind) { return kind == BlockKind::ground; }

bool is_log(BlockKind kind) {
  return kind == BlockKind::oak_log || kind == BlockKind::spruce_log || kind == BlockKind::birch_log;
}

bool is_station(BlockKind kind) {
  return kind == BlockKind::crafting_table || kind == BlockKind::furnace;
}

int chebyshev(Pos a, Pos b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

Pos step_towards(Pos p, Direction d) {
  switch (d) {
    case Direction::north:
      return {p.x, p.y - 1};
    case Direction::east:
      return {p.x + 1, p.y};
    case Direction::south:
      return {p.x, p.y + 1};
    case Direction::west:
      return {p.x - 1, p.y};
  }
  return p;
}

std::string_view to_string(Direction d) {
  constexpr std::array<std::string_view, 4> names = {"north", "east", "south", "west"};
  return names[static_cast<std::size_t>(d)];
}

std::string_view to_string(Biome biome) { return kBiomeNames[static_cast<std::size_t>(biome)]; }

std::optional<Biome> biome_from_string(std::string_view name) {
  return lookup<Biome>(kBiomeNames, name);
}

std::string_view to_string(TimeOfDay t) { return t == TimeOfDay::day ? "day" : "night"; }

std::string_view to_string(ToolTier tier) { return kTierNames[static_cast<std::size_t>(tier)]; }

std::optional<ToolTier> tool_tier_from_string(std::string_view name) {
  return lookup<ToolTier>(kTierNames, name);
}

std::string_view to_string(Verb verb) { return kVerbNames[static_cast<std::size_t>(verb)]; }

std::optional<Verb> verb_from_string(std::string_view name) { return lookup<Verb>(kVerbNames, name); }

std::string to_debug_string(const Task& task) {
  return std::string(to_string(task.verb)) + "(" + task.item + "x" + std::to_string(task.count) +
         ")";
}

std::string_view to_string(OutcomeReason reason) {
  return kReasonNames[static_cast<std::size_t>(reason)];
}

std::optional<OutcomeReason> outcome_reason_from_string(std::string_view name) {
  return lookup<OutcomeReason>(kReasonNames, name);
}

}  // namespace craftagent
