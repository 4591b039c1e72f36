#include "craftagent/craftworld/world.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <random>

#include "craftagent/util/hash.hpp"

namespace craftagent {

using nlohmann::json;

namespace {

// std::mt19937_64 output is specified by the standard; the std
// distributions are not, so sampling is done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double unit() { return unit_interval(engine_()); }
  int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 engine_;
};

double tree_factor(Biome b) {
  switch (b) {
    case Biome::forest:
    case Biome::taiga:
      return 2.0;
    case Biome::plains:
    case Biome::mountains:
      return 0.4;
  }
  return 1.0;
}

BlockKind log_for(Biome b, Rng& rng) {
  switch (b) {
    case Biome::taiga:
    case Biome::mountains:
      return BlockKind::spruce_log;
    case Biome::forest:
      return rng.unit() < 0.6 ? BlockKind::oak_log : BlockKind::birch_log;
    case Biome::plains:
      return BlockKind::oak_log;
  }
  return BlockKind::oak_log;
}

constexpr std::array<Pos, 8> kRing = {Pos{-1, -1}, Pos{0, -1}, Pos{1, -1}, Pos{-1, 0},
                                      Pos{1, 0},   Pos{-1, 1}, Pos{0, 1},  Pos{1, 1}};

enum class Resource { logs, stone, coal, iron, gold };

bool in_group(BlockKind k, Resource r) {
  switch (r) {
    case Resource::logs:
      return is_log(k);
    case Resource::stone:
      return k == BlockKind::stone;
    case Resource::coal:
      return k == BlockKind::coal_ore;
    case Resource::iron:
      return k == BlockKind::iron_ore;
    case Resource::gold:
      return k == BlockKind::gold_ore;
  }
  return false;
}

int reachable_count(const WorldState& s, const std::vector<bool>& comp, Resource r) {
  int n = 0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const Pos p{x, y};
      if (!in_group(s.at(p), r)) continue;
      const bool touches = std::any_of(kRing.begin(), kRing.end(), [&](Pos d) {
        const Pos q{x + d.x, y + d.y};
        return s.in_bounds(q) && comp[static_cast<std::size_t>(q.y) * s.width + q.x];
      });
      if (touches) ++n;
    }
  }
  return n;
}

void top_up(WorldState& s, const WorldConfig& cfg, Rng& rng, Resource r, int minimum) {
  for (;;) {
    const auto comp = walkable_component(s);
    if (reachable_count(s, comp, r) >= minimum) return;
    std::vector<Pos> open;
    for (int y = 1; y + 1 < s.height; ++y) {
      for (int x = 1; x + 1 < s.width; ++x) {
        const Pos p{x, y};
        if (!comp[static_cast<std::size_t>(y) * s.width + x]) continue;
        if (chebyshev(p, s.player) <= cfg.spawn_clear_radius + 1) continue;
        const bool clear = std::all_of(kRing.begin(), kRing.end(), [&](Pos d) {
          return is_walkable(s.at({x + d.x, y + d.y}));
        });
        if (clear) open.push_back(p);
      }
    }
    if (open.empty()) throw ConfigError("world too small to place required resources");
    const Pos p = open[static_cast<std::size_t>(rng.below(static_cast<int>(open.size())))];
    switch (r) {
      case Resource::logs:
        s.set(p, log_for(s.biome_at(p), rng));
        break;
      case Resource::stone:
        s.set(p, BlockKind::stone);
        break;
      case Resource::coal:
        s.set(p, BlockKind::coal_ore);
        break;
      case Resource::iron:
        s.set(p, BlockKind::iron_ore);
        break;
      case Resource::gold:
        s.set(p, BlockKind::gold_ore);
        break;
    }
  }
}

}  // namespace

void WorldConfig::validate() const {
  if (width < 16 || height < 16) throw ConfigError("world must be at least 16x16");
  if (region_size < 1) throw ConfigError("region_size must be >= 1");
  if (outcrop_size < 1) throw ConfigError("outcrop_size must be >= 1");
  const std::array<std::pair<const char*, double>, 5> required = {{
      {"tree_density", tree_density},
      {"stone_density", stone_density},
      {"coal_density", coal_density},
      {"iron_density", iron_density},
      {"gold_density", gold_density},
  }};
  for (const auto& [name, value] : required) {
    if (!(value > 0.0 && value < 1.0)) {
      throw ConfigError(std::string(name) + " must lie in (0,1); the goal is unreachable otherwise");
    }
  }
  if (coal_density + iron_density + gold_density >= 1.0) {
    throw ConfigError("ore densities must sum to less than 1");
  }
  if (water_density < 0.0 || water_density >= 1.0) throw ConfigError("water_density must lie in [0,1)");
  if (zombie_count < 0 || cow_count < 0) throw ConfigError("entity counts must be >= 0");
  if (spawn_clear_radius < 1) throw ConfigError("spawn_clear_radius must be >= 1");
  if (min_reachable_logs < 1 || min_reachable_stone < 1 || min_reachable_coal < 1 ||
      min_reachable_iron < 1 || min_reachable_gold < 1) {
    throw ConfigError("min_reachable_* must be >= 1");
  }
}

json WorldConfig::to_json() const {
  return {
      {"width", width},
      {"height", height},
      {"region_size", region_size},
      {"tree_density", tree_density},
      {"stone_density", stone_density},
      {"outcrop_size", outcrop_size},
      {"coal_density", coal_density},
      {"iron_density", iron_density},
      {"gold_density", gold_density},
      {"water_density", water_density},
      {"zombie_count", zombie_count},
      {"cow_count", cow_count},
      {"spawn_clear_radius", spawn_clear_radius},
      {"min_reachable_logs", min_reachable_logs},
      {"min_reachable_stone", min_reachable_stone},
      {"min_reachable_coal", min_reachable_coal},
      {"min_reachable_iron", min_reachable_iron},
      {"min_reachable_gold", min_reachable_gold},
  };
}

WorldConfig WorldConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("world config: expected object");
  WorldConfig c;
  const json defaults = c.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("world config: unknown key '" + key + "'");
  }
  try {
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.region_size = j.value("region_size", c.region_size);
    c.tree_density = j.value("tree_density", c.tree_density);
    c.stone_density = j.value("stone_density", c.stone_density);
    c.outcrop_size = j.value("outcrop_size", c.outcrop_size);
    c.coal_density = j.value("coal_density", c.coal_density);
    c.iron_density = j.value("iron_density", c.iron_density);
    c.gold_density = j.value("gold_density", c.gold_density);
    c.water_density = j.value("water_density", c.water_density);
    c.zombie_count = j.value("zombie_count", c.zombie_count);
    c.cow_count = j.value("cow_count", c.cow_count);
    c.spawn_clear_radius = j.value("spawn_clear_radius", c.spawn_clear_radius);
    c.min_reachable_logs = j.value("min_reachable_logs", c.min_reachable_logs);
    c.min_reachable_stone = j.value("min_reachable_stone", c.min_reachable_stone);
    c.min_reachable_coal = j.value("min_reachable_coal", c.min_reachable_coal);
    c.min_reachable_iron = j.value("min_reachable_iron", c.min_reachable_iron);
    c.min_reachable_gold = j.value("min_reachable_gold", c.min_reachable_gold);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("world config: ") + e.what());
  }
  c.validate();
  return c;
}

Biome WorldState::biome_at(Pos p) const {
  const int cols = (width + region_size - 1) / region_size;
  return biome_regions[static_cast<std::size_t>(p.y / region_size) * cols + p.x / region_size];
}

TimeOfDay time_for_tick(std::int64_t tick) {
  return (tick / kTicksPerDayPhase) % 2 == 0 ? TimeOfDay::day : TimeOfDay::night;
}

std::vector<bool> walkable_component(const WorldState& s) {
  std::vector<bool> seen(s.grid.size(), false);
  if (!s.in_bounds(s.player)) return seen;
  std::deque<Pos> queue{s.player};
  seen[static_cast<std::size_t>(s.player.y) * s.width + s.player.x] = true;
  while (!queue.empty()) {
    const Pos p = queue.front();
    queue.pop_front();
    for (Direction d : {Direction::north, Direction::east, Direction::south, Direction::west}) {
      const Pos q = step_towards(p, d);
      if (!s.in_bounds(q) || !is_walkable(s.at(q))) continue;
      auto idx = static_cast<std::size_t>(q.y) * s.width + q.x;
      if (seen[idx]) continue;
      seen[idx] = true;
      queue.push_back(q);
    }
  }
  return seen;
}

WorldState flat_world(int width, int height, std::uint64_t seed) {
  WorldState s;
  s.width = width;
  s.height = height;
  s.grid.assign(static_cast<std::size_t>(width) * height, BlockKind::ground);
  s.region_size = std::max(width, height);
  s.biome_regions = {Biome::plains};
  s.player = {width / 2, height / 2};
  s.rng_seed = seed;
  return s;
}

WorldState generate_world(std::uint64_t seed, const WorldConfig& cfg) {
  cfg.validate();
  Rng rng(seed);
  WorldState s;
  s.width = cfg.width;
  s.height = cfg.height;
  s.rng_seed = seed;
  s.region_size = cfg.region_size;
  s.grid.assign(static_cast<std::size_t>(cfg.width) * cfg.height, BlockKind::ground);

  const int cols = (cfg.width + cfg.region_size - 1) / cfg.region_size;
  const int rows = (cfg.height + cfg.region_size - 1) / cfg.region_size;
  s.biome_regions.resize(static_cast<std::size_t>(cols) * rows);
  for (auto& b : s.biome_regions) b = static_cast<Biome>(rng.below(4));

  const double area = static_cast<double>(cfg.width) * cfg.height;

  const int lakes = static_cast<int>(cfg.water_density * area + 0.5);
  for (int i = 0; i < lakes; ++i) {
    const Pos c{rng.below(cfg.width), rng.below(cfg.height)};
    const int r = 1 + rng.below(2);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const Pos p{c.x + dx, c.y + dy};
        if (std::abs(dx) + std::abs(dy) <= r && s.in_bounds(p)) s.set(p, BlockKind::water);
      }
    }
  }

  const int outcrops = std::max(1, static_cast<int>(cfg.stone_density * area + 0.5));
  for (int i = 0; i < outcrops; ++i) {
    Pos p{rng.below(cfg.width), rng.below(cfg.height)};
    // Outcrops favour mountain regions.
    for (int tries = 0; tries < 4 && s.biome_at(p) != Biome::mountains && rng.unit() >= 0.5;
         ++tries) {
      p = {rng.below(cfg.width), rng.below(cfg.height)};
    }
    for (int k = 0; k < cfg.outcrop_size; ++k) {
      s.set(p, BlockKind::stone);
      const Pos q = step_towards(p, static_cast<Direction>(rng.below(4)));
      if (s.in_bounds(q)) p = q;
    }
  }

  for (auto& cell : s.grid) {
    if (cell != BlockKind::stone) continue;
    const double r = rng.unit();
    if (r < cfg.gold_density) {
      cell = BlockKind::gold_ore;
    } else if (r < cfg.gold_density + cfg.iron_density) {
      cell = BlockKind::iron_ore;
    } else if (r < cfg.gold_density + cfg.iron_density + cfg.coal_density) {
      cell = BlockKind::coal_ore;
    }
  }

  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      const Pos p{x, y};
      if (s.at(p) != BlockKind::ground) continue;
      const Biome b = s.biome_at(p);
      if (rng.unit() < cfg.tree_density * tree_factor(b)) s.set(p, log_for(b, rng));
    }
  }

  s.player = {cfg.width / 2, cfg.height / 2};
  for (int dy = -cfg.spawn_clear_radius; dy <= cfg.spawn_clear_radius; ++dy) {
    for (int dx = -cfg.spawn_clear_radius; dx <= cfg.spawn_clear_radius; ++dx) {
      const Pos p{s.player.x + dx, s.player.y + dy};
      if (s.in_bounds(p)) s.set(p, BlockKind::ground);
    }
  }

  top_up(s, cfg, rng, Resource::logs, cfg.min_reachable_logs);
  top_up(s, cfg, rng, Resource::stone, cfg.min_reachable_stone);
  top_up(s, cfg, rng, Resource::coal, cfg.min_reachable_coal);
  top_up(s, cfg, rng, Resource::iron, cfg.min_reachable_iron);
  top_up(s, cfg, rng, Resource::gold, cfg.min_reachable_gold);

  const auto comp = walkable_component(s);
  std::vector<Pos> free;
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      const Pos p{x, y};
      if (comp[static_cast<std::size_t>(y) * cfg.width + x] && p != s.player) free.push_back(p);
    }
  }
  auto spawn_entities = [&](const char* kind, int count) {
    for (int i = 0; i < count && !free.empty(); ++i) {
      const auto idx = static_cast<std::size_t>(rng.below(static_cast<int>(free.size())));
      s.entities.push_back({kind, free[idx]});
      free.erase(free.begin() + static_cast<std::ptrdiff_t>(idx));
    }
  };
  spawn_entities("zombie", cfg.zombie_count);
  spawn_entities("cow", cfg.cow_count);

  s.time_of_day = time_for_tick(0);
  return s;
}

std::string state_digest(const WorldState& s) {
  json j;
  std::string grid;
  grid.reserve(s.grid.size());
  for (BlockKind k : s.grid) grid.push_back(static_cast<char>('a' + static_cast<int>(k)));
  j["grid"] = grid;
  j["size"] = {s.width, s.height};
  json ents = json::array();
  for (const auto& e : s.entities) ents.push_back({e.kind, e.pos.x, e.pos.y});
  j["entities"] = ents;
  j["player"] = {s.player.x, s.player.y, static_cast<int>(s.facing)};
  j["equipped"] = s.equipped;
  json inv = json::object();
  for (const auto& [item, n] : s.inventory.items()) inv[item] = n;
  j["inventory"] = inv;
  json st = json::array();
  for (const auto& p : s.placed_stations) st.push_back({p.x, p.y});
  j["stations"] = st;
  j["time"] = static_cast<int>(s.time_of_day);
  json biomes = json::array();
  for (Biome b : s.biome_regions) biomes.push_back(static_cast<int>(b));
  j["biomes"] = biomes;
  j["region_size"] = s.region_size;
  j["seed"] = s.rng_seed;
  j["tick"] = s.tick;
  j["vitals"] = {s.health, s.hunger};
  return sha256_hex(j.dump());
}

}  // namespace craftagent
