#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace craftagent {

enum class BlockKind : std::uint8_t {
  ground,
  oak_log,
  spruce_log,
  birch_log,
  stone,
  iron_ore,
  gold_ore,
  coal_ore,
  water,
  crafting_table,
  furnace,
  unknown,
};

inline constexpr int kBlockKindCount = 12;

std::string_view to_string(BlockKind kind);
std::optional<BlockKind> block_kind_from_string(std::string_view name);

// Blocks that stop line of sight and cannot be walked through.
bool is_opaque(BlockKind kind);
bool is_walkable(BlockKind kind);
bool is_log(BlockKind kind);
bool is_station(BlockKind kind);

struct Pos {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Pos&, const Pos&) = default;
  friend bool operator==(const Pos&, const Pos&) = default;
};

int chebyshev(Pos a, Pos b);

enum class Direction : std::uint8_t { north, east, south, west };

Pos step_towards(Pos p, Direction d);
std::string_view to_string(Direction d);

enum class Biome : std::uint8_t { forest, taiga, plains, mountains };

std::string_view to_string(Biome biome);
std::optional<Biome> biome_from_string(std::string_view name);

enum class TimeOfDay : std::uint8_t { day, night };

std::string_view to_string(TimeOfDay t);

// Mining tiers, ordered. A tier can mine everything a lower tier can.
enum class ToolTier : std::uint8_t { hand = 0, wooden = 1, stone = 2, iron = 3 };

std::string_view to_string(ToolTier tier);
std::optional<ToolTier> tool_tier_from_string(std::string_view name);

enum class Verb : std::uint8_t { obtain, mine, craft, smelt, place, explore };

std::string_view to_string(Verb verb);
std::optional<Verb> verb_from_string(std::string_view name);

// A canonical curriculum task. `item` is drawn from the closed item
// vocabulary (see rules.hpp); count >= 1.
struct Task {
  Verb verb = Verb::obtain;
  std::string item;
  int count = 1;

  friend bool operator==(const Task&, const Task&) = default;
};

std::string to_debug_string(const Task& task);

enum class OutcomeReason : std::uint8_t {
  completed,
  no_station_placed,
  missing_ingredients,
  tool_tier_too_low,
  target_not_found,
  step_budget_exhausted,
};

std::string_view to_string(OutcomeReason reason);
std::optional<OutcomeReason> outcome_reason_from_string(std::string_view name);

struct TaskOutcome {
  bool success = false;
  OutcomeReason reason = OutcomeReason::target_not_found;
  int steps_used = 0;

  static TaskOutcome done(int steps) { return {true, OutcomeReason::completed, steps}; }
  static TaskOutcome failed(OutcomeReason why, int steps) { return {false, why, steps}; }

  friend bool operator==(const TaskOutcome&, const TaskOutcome&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace craftagent
