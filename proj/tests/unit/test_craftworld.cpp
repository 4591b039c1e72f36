#include <doctest.h>

#include <map>
#include <random>

#include "craftagent/craftworld/actions.hpp"
#include "craftagent/craftworld/executor.hpp"
#include "craftagent/craftworld/world.hpp"

using namespace craftagent;

namespace {

WorldState spruce_state() {
  WorldState s = flat_world(24, 24);
  s.inventory = Inventory{{"spruce_planks", 16}, {"stick", 8},          {"rotten_flesh", 1},
                          {"spruce_log", 5},     {"crafting_table", 1}, {"spruce_sapling", 1}};
  sync_equipment(s);
  return s;
}

}  // namespace

TEST_CASE("generate_world is a deterministic function of seed and config") {
  const WorldState a = generate_world(7);
  const WorldState b = generate_world(7);
  CHECK(a == b);
  CHECK(state_digest(a) == state_digest(b));
}

TEST_CASE("different seeds give different grids") {
  const WorldState a = generate_world(1);
  const WorldState b = generate_world(2);
  int differing = 0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) differing += a.grid[i] != b.grid[i];
  CHECK(differing >= 1);
}

TEST_CASE("seed 7 world holds gold ore and every required resource within reach") {
  const WorldState s = generate_world(7);
  std::map<BlockKind, int> counts;
  for (BlockKind k : s.grid) ++counts[k];
  CHECK(counts[BlockKind::gold_ore] >= 1);
  CHECK(counts[BlockKind::iron_ore] >= 1);
  CHECK(counts[BlockKind::coal_ore] >= 1);
  CHECK(counts[BlockKind::stone] >= 1);
  CHECK(counts[BlockKind::oak_log] + counts[BlockKind::spruce_log] + counts[BlockKind::birch_log] >=
        1);
  CHECK(s.in_bounds(s.player));
  CHECK(s.at(s.player) == BlockKind::ground);
}

TEST_CASE("world config validation") {
  WorldConfig c;
  c.gold_density = 0.0;
  CHECK_THROWS_AS(generate_world(1, c), ConfigError);
  c = {};
  c.width = 15;
  CHECK_THROWS_AS(generate_world(1, c), ConfigError);
  c = {};
  c.iron_density = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(WorldConfig::from_json({{"no_such_key", 1}}), ConfigError);
  CHECK(WorldConfig::from_json(WorldConfig{}.to_json()) == WorldConfig{});
}

TEST_CASE("mining iron ore with a wooden pickaxe is gated") {
  WorldState s = flat_world(20, 20);
  s.set({s.player.x + 1, s.player.y}, BlockKind::iron_ore);
  s.inventory = Inventory{{"wooden_pickaxe", 1}};
  sync_equipment(s);
  const auto [next, r] = apply_primitive(s, action::Mine{{s.player.x + 1, s.player.y}});
  CHECK(r.status == StepStatus::tool_tier_too_low);
  CHECK(next == s);
}

TEST_CASE("crafting planks from one spruce log yields four spruce planks") {
  WorldState s = flat_world(20, 20);
  s.inventory = Inventory{{"spruce_log", 1}};
  const auto [next, r] = apply_primitive(s, action::Craft{"spruce_planks"});
  REQUIRE(r.ok());
  CHECK(next.inventory.count("spruce_log") == 0);
  CHECK(next.inventory.count("spruce_planks") == 4);
  CHECK(next.tick == s.tick + 1);
}

TEST_CASE("smelting raw gold at a placed furnace consumes one fuel unit") {
  WorldState s = flat_world(20, 20);
  s.inventory = Inventory{{"raw_gold", 1}, {"coal", 1}, {"furnace", 1}};
  auto [placed, pr] = apply_primitive(s, action::Place{"furnace"});
  REQUIRE(pr.ok());
  auto [next, r] = apply_primitive(placed, action::Smelt{"raw_gold", 1});
  REQUIRE(r.ok());
  CHECK(next.inventory.count("gold_ingot") == 1);
  CHECK(next.inventory.count("raw_gold") == 0);
  CHECK(next.inventory.count("coal") == 0);
}

TEST_CASE("can_craft needs a placed station, not a held one") {
  WorldState s = spruce_state();
  auto f = can_craft(s, "wooden_pickaxe");
  CHECK_FALSE(f.feasible);
  REQUIRE(f.missing.size() == 1);
  CHECK(f.missing[0] == Requirement{Requirement::Kind::station, "crafting_table", 1});

  auto [placed, r] = apply_primitive(s, action::Place{"crafting_table"});
  REQUIRE(r.ok());
  f = can_craft(placed, "wooden_pickaxe");
  CHECK(f.feasible);
  CHECK(f.missing.empty());

  WorldState empty = flat_world(20, 20);
  f = can_craft(empty, "golden_pickaxe");
  CHECK_FALSE(f.feasible);
  REQUIRE(f.missing.size() == 3);
  CHECK(f.missing[0] == Requirement{Requirement::Kind::item, "gold_ingot", 3});
  CHECK(f.missing[1] == Requirement{Requirement::Kind::item, "stick", 2});
  CHECK(f.missing[2].kind == Requirement::Kind::station);

  CHECK_THROWS_AS(can_craft(empty, "diamond_pickaxe"), std::invalid_argument);
}

TEST_CASE("nearby_blocks") {
  WorldState flat = flat_world(20, 20);
  CHECK(nearby_blocks(flat, 5).empty());
  CHECK_THROWS_AS(nearby_blocks(flat, 0), std::invalid_argument);

  flat.inventory = Inventory{{"furnace", 1}};
  auto [placed, r] = apply_primitive(flat, action::Place{"furnace"});
  REQUIRE(r.ok());
  const Pos cell = *placed.placed_stations.begin();
  const auto near = nearby_blocks(placed, 1);
  REQUIRE(near.size() == 1);
  CHECK(near[0] == BlockSighting{BlockKind::furnace, cell});

  SUBCASE("equals a brute-force scan of the 11x11 window") {
    for (std::uint64_t seed : {3u, 7u, 11u}) {
      const WorldState s = generate_world(seed);
      std::multiset<std::pair<int, std::pair<int, int>>> expected;
      for (int dy = -5; dy <= 5; ++dy) {
        for (int dx = -5; dx <= 5; ++dx) {
          const Pos p{s.player.x + dx, s.player.y + dy};
          if (p.x < 0 || p.y < 0 || p.x >= s.width || p.y >= s.height) continue;
          const BlockKind k = s.grid[static_cast<std::size_t>(p.y) * s.width + p.x];
          if (k != BlockKind::ground) expected.insert({static_cast<int>(k), {p.x, p.y}});
        }
      }
      std::multiset<std::pair<int, std::pair<int, int>>> actual;
      for (const auto& b : nearby_blocks(s, 5)) {
        actual.insert({static_cast<int>(b.kind), {b.pos.x, b.pos.y}});
      }
      CHECK(actual == expected);
    }
  }
}

TEST_CASE("execute_task outcomes") {
  SUBCASE("smelting with an unplaced furnace fails without touching state") {
    WorldState s = flat_world(20, 20);
    s.inventory = Inventory{{"raw_gold", 3}, {"stick", 2}, {"furnace", 1}};
    const WorldState before = s;
    const auto out = execute_task(s, Task{Verb::smelt, "raw_gold", 3}, 100);
    CHECK_FALSE(out.success);
    CHECK(out.reason == OutcomeReason::no_station_placed);
    CHECK(out.steps_used == 0);
    CHECK(s == before);
  }
  SUBCASE("placing a held furnace") {
    WorldState s = flat_world(20, 20);
    s.inventory = Inventory{{"furnace", 1}};
    const auto out = execute_task(s, Task{Verb::place, "furnace", 1}, 100);
    CHECK(out.success);
    CHECK(out.reason == OutcomeReason::completed);
    REQUIRE(s.placed_stations.size() == 1);
    CHECK(s.at(*s.placed_stations.begin()) == BlockKind::furnace);
    CHECK(s.inventory.count("furnace") == 0);
  }
  SUBCASE("obtaining a log on the seeded world") {
    WorldState s = generate_world(7);
    const auto out = execute_task(s, Task{Verb::obtain, "wood_log", 1}, 200);
    CHECK(out.success);
    CHECK(s.inventory.count_matching("wood_log") >= 1);
  }
  SUBCASE("mining above tier reports tool_tier_too_low") {
    WorldState s = generate_world(7);
    const auto out = execute_task(s, Task{Verb::mine, "iron_ore", 1}, 200);
    CHECK(out.reason == OutcomeReason::tool_tier_too_low);
  }
  SUBCASE("missing ingredients with a station in place") {
    WorldState s = flat_world(20, 20);
    s.inventory = Inventory{{"crafting_table", 1}};
    REQUIRE(execute_task(s, Task{Verb::place, "crafting_table", 1}, 10).success);
    const WorldState before = s;
    const auto out = execute_task(s, Task{Verb::craft, "wooden_pickaxe", 1}, 10);
    CHECK(out.reason == OutcomeReason::missing_ingredients);
    CHECK(s == before);
  }
  SUBCASE("step budget") {
    WorldState s = generate_world(7);
    const auto out = execute_task(s, Task{Verb::obtain, "wood_log", 20}, 3);
    CHECK(out.reason == OutcomeReason::step_budget_exhausted);
    CHECK(out.steps_used == 3);
  }
}

TEST_CASE("goal_reached") {
  WorldState s = flat_world(20, 20);
  CHECK_FALSE(goal_reached(s));
  s.inventory = Inventory{{"gold_ingot", 3}, {"stick", 2}};
  CHECK_FALSE(goal_reached(s));
  s.inventory = Inventory{{"golden_pickaxe", 1}};
  CHECK(goal_reached(s));
  CHECK_FALSE(goal_reached(generate_world(7)));
}

TEST_CASE("tool gating is monotone in tier") {
  const Rules& rules = Rules::defaults();
  for (const auto& m : rules.mining) {
    for (int t = 0; t <= 3; ++t) {
      const bool can = static_cast<int>(m.min_tier) <= t;
      for (int higher = t + 1; higher <= 3 && can; ++higher) {
        CHECK(static_cast<int>(m.min_tier) <= higher);
      }
    }
  }
}

TEST_CASE("rules round-trip through JSON and validate") {
  const Rules& rules = Rules::defaults();
  CHECK(Rules::from_json(rules.to_json()) == rules);
  auto j = rules.to_json();
  j["recipes"][0]["fuel_cost"] = 2;
  CHECK_THROWS_AS(Rules::from_json(j), ConfigError);
  j = rules.to_json();
  j["recipes"][0]["outputs"] = nlohmann::json::array();
  CHECK_THROWS_AS(Rules::from_json(j), ConfigError);
  CHECK(rules.fingerprint().size() == 64);
}

TEST_CASE("inventory capacity is 36 kinds") {
  Inventory inv;
  for (int i = 0; i < kInventorySlots; ++i) CHECK(inv.add("item" + std::to_string(i), 1));
  CHECK_FALSE(inv.add("one_more", 1));
  CHECK(inv.add("item0", 5));
  CHECK(inv.slots_used() == kInventorySlots);
}
