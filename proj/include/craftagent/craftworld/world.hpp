#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "craftagent/craftworld/inventory.hpp"
#include "craftagent/craftworld/types.hpp"

namespace craftagent {

struct Entity {
  std::string kind;
  Pos pos;

  friend bool operator==(const Entity&, const Entity&) = default;
};

// World-generation parameters. Densities are per-cell probabilities in (0,1).
// Defaults are sized for sub-second trials; they are not canonical.
struct WorldConfig {
  int width = 48;
  int height = 48;
  int region_size = 16;  // biome regions are region_size x region_size

  double tree_density = 0.05;
  double stone_density = 0.012;  // outcrop seeds per cell
  int outcrop_size = 10;
  double coal_density = 0.12;  // fraction of outcrop cells
  double iron_density = 0.08;
  double gold_density = 0.05;
  double water_density = 0.002;  // lake seeds per cell
  int zombie_count = 4;
  int cow_count = 4;
  int spawn_clear_radius = 2;

  // Minimum counts of each resource that must be minable from the spawn
  // component; generation tops up with isolated blocks when short.
  int min_reachable_logs = 12;
  int min_reachable_stone = 24;
  int min_reachable_coal = 3;
  int min_reachable_iron = 6;
  int min_reachable_gold = 6;

  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
  static WorldConfig from_json(const nlohmann::json& j);  // missing keys keep defaults

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

inline constexpr int kTicksPerDayPhase = 600;
inline constexpr int kMaxVital = 20;

struct WorldState {
  int width = 0;
  int height = 0;
  std::vector<BlockKind> grid;  // row-major, y * width + x
  std::vector<Entity> entities;
  Pos player;
  Direction facing = Direction::north;
  std::string equipped;  // empty = bare hand
  Inventory inventory;
  std::set<Pos> placed_stations;
  TimeOfDay time_of_day = TimeOfDay::day;
  int region_size = 16;
  std::vector<Biome> biome_regions;  // row-major over regions
  std::uint64_t rng_seed = 0;
  std::int64_t tick = 0;
  int health = kMaxVital;
  int hunger = kMaxVital;

  bool in_bounds(Pos p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
  BlockKind at(Pos p) const { return grid[static_cast<std::size_t>(p.y) * width + p.x]; }
  void set(Pos p, BlockKind k) { grid[static_cast<std::size_t>(p.y) * width + p.x] = k; }
  Biome biome_at(Pos p) const;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

WorldState generate_world(std::uint64_t seed, const WorldConfig& config = {});

// A ground-only world of the given size with the player at the centre.
// Used by fixtures and tests.
WorldState flat_world(int width, int height, std::uint64_t seed = 0);

TimeOfDay time_for_tick(std::int64_t tick);

// Cells reachable on foot from the player (4-connected walkable cells).
std::vector<bool> walkable_component(const WorldState& state);

// Stable digest of the full state, used for determinism checks.
std::string state_digest(const WorldState& state);

}  // namespace craftagent
