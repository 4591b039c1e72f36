#include <doctest.h>

#include <random>

#include "craftagent/curriculum/curriculum.hpp"

using namespace craftagent;

namespace {

const char* kSpruceReply =
    "Inventory (6/36): {'spruce_planks': 16, 'stick': 8, 'rotten_flesh': 1, 'spruce_log': 5, "
    "'crafting_table': 1, 'spruce_sapling': 1}\n\n"
    "Reasoning: The main goal is to create a golden pickaxe. One of the essential steps in this "
    "process is to have the necessary crafting tools, such as a crafting table and sticks for "
    "crafting. Currently, we are in a forested area with spruce trees, which provides an "
    "opportunity to gather wood.\n\n"
    "Task: Obtain a wood log.";

const char* kSmeltReply =
    "Reasoning: The player has mined gold ore but has not smelted it yet. Since the player's "
    "ultimate goal is to create a golden pickaxe, they need to smelt the gold ore to obtain gold "
    "ingots. The player has a furnace in their inventory, so they can use it to smelt the gold "
    "ore.\n\n"
    "Task: Smelt 3 raw gold.";

const char* kPlaceReply =
    "Reasoning: The player has raw gold and sticks in the inventory, and a furnace. The player "
    "can smelt the raw gold into gold ingots using the furnace, and then use the gold ingots and "
    "sticks to craft a golden pickaxe.\n\n"
    "Task: Place the furnace.";

Task T(Verb v, const char* item, int n) { return Task{v, item, n}; }

DualProposal dual(Task a, std::optional<Task> b) {
  DualProposal d;
  d.response1 = {"r1", std::move(a)};
  if (b) d.response2 = PredictiveProposal{{"r2", *b}, {{*b}, {"x"}, {"y"}, {}}};
  return d;
}

Observation unplaced_furnace_obs() {
  Observation o;
  o.inventory = Inventory{{"raw_gold", 3}, {"stick", 2}, {"furnace", 1}};
  o.position = {10, 12};
  o.biome = Biome::mountains;
  o.nearby_blocks = {{BlockKind::stone, {11, 12}}, {BlockKind::gold_ore, {9, 13}}};
  o.nearby_entities = {{"zombie", {12, 12}}};
  return o;
}

}  // namespace

TEST_CASE("render_task") {
  CHECK(render_task(T(Verb::smelt, "raw_gold", 3)) == "Smelt 3 raw gold.");
  CHECK(render_task(T(Verb::obtain, "wood_log", 1)) == "Obtain a wood log.");
  CHECK(render_task(T(Verb::place, "furnace", 1)) == "Place the furnace.");
  CHECK(render_task(T(Verb::craft, "golden_pickaxe", 1)) == "Craft 1 golden pickaxe.");
  CHECK(render_task(T(Verb::mine, "iron_ore", 1)) == "Mine an iron ore.");
  CHECK(render_task(T(Verb::craft, "stick", 4)) == "Craft 4 sticks.");
  CHECK(render_task(T(Verb::obtain, "wood_log", 3)) == "Obtain 3 wood logs.");
}

TEST_CASE("parse_task canonicalizes phrasing") {
  CHECK(parse_task("Smelt 3 raw gold") == T(Verb::smelt, "raw_gold", 3));
  CHECK(parse_task("obtain a wood log.") == T(Verb::obtain, "wood_log", 1));
  CHECK(parse_task("Place the furnace.") == T(Verb::place, "furnace", 1));
  CHECK(parse_task("Mine 3 iron ore") == T(Verb::mine, "iron_ore", 3));
  CHECK(parse_task("Collect 2 spruce logs") == T(Verb::obtain, "spruce_log", 2));
  CHECK(parse_task("Craft a gold pickaxe") == T(Verb::craft, "golden_pickaxe", 1));
  CHECK(parse_task("craft two sticks") == T(Verb::craft, "stick", 2));
  CHECK(parse_task("Craft 4 wooden planks") == T(Verb::craft, "planks", 4));
  CHECK(parse_task("Explore for iron ore") == T(Verb::explore, "iron_ore", 1));
  CHECK(parse_task("  **Mine 5 cobblestone**  ") == T(Verb::mine, "cobblestone", 5));
  CHECK(parse_task("Craft 1 crafting table") == T(Verb::craft, "crafting_table", 1));

  const auto kind_of = [](std::string_view text) {
    try {
      parse_task(text);
    } catch (const ParseError& e) {
      return e.kind();
    }
    FAIL("no error for " << text);
    return ParseErrorKind::missing_task;
  };
  CHECK(kind_of("Dance a jig") == ParseErrorKind::unknown_verb);
  CHECK(kind_of("Obtain a diamond") == ParseErrorKind::unknown_item);
  CHECK(kind_of("Obtain 0 logs") == ParseErrorKind::bad_quantity);
  CHECK(kind_of("   ") == ParseErrorKind::missing_task);
}

TEST_CASE("verbatim example outputs parse to the stated tasks") {
  for (PromptMode mode : {PromptMode::conventional}) {
    CHECK(parse_planner_output(kSpruceReply, mode).response1.task == T(Verb::obtain, "wood_log", 1));
    CHECK(parse_planner_output(kSmeltReply, mode).response1.task ==
          T(Verb::smelt, "raw_gold", 3));
    CHECK(parse_planner_output(kPlaceReply, mode).response1.task ==
          T(Verb::place, "furnace", 1));
  }
  const DualProposal d = parse_planner_output(kSmeltReply, PromptMode::conventional);
  CHECK(d.response1.reasoning.rfind("The player has mined gold ore", 0) == 0);
  CHECK_FALSE(d.response2.has_value());
}

TEST_CASE("the smelt and place replies as one dual response") {
  const std::string text = std::string("Response1:\n") + kSmeltReply +
                           "\n\nResponse2:\n" +
                           "Reasoning: plan first.\nSteps:\n1. Place the furnace.\n"
                           "2. Smelt 3 raw gold.\n3. Craft 1 golden pickaxe.\n"
                           "Predicted State:\n1. furnace placed\n2. 3 gold ingots\n3. done\n"
                           "Risks:\n1. none\n2. fuel\n3. no crafting table\n" +
                           "Task: Place the furnace.";
  const DualProposal d = parse_planner_output(text, PromptMode::predictive);
  CHECK(d.response1.task == T(Verb::smelt, "raw_gold", 3));
  REQUIRE(d.response2.has_value());
  CHECK(d.response2->proposal.task == T(Verb::place, "furnace", 1));
  CHECK(d.response2->plan.steps.size() == 3);
  CHECK(d.response2->plan.predicted_state_changes.size() == 3);
  CHECK(d.response2->plan.risks[1] == "fuel");
  CHECK(adopt(d, PromptMode::conventional).task == T(Verb::smelt, "raw_gold", 3));
  CHECK(adopt(d, PromptMode::predictive).task == T(Verb::place, "furnace", 1));
  CHECK_FALSE(task_match(d.response1.task, d.response2->proposal.task));
}

TEST_CASE("planner output errors") {
  const auto kind_of = [](std::string_view text, PromptMode mode) {
    try {
      parse_planner_output(text, mode);
    } catch (const ParseError& e) {
      return e.kind();
    }
    FAIL("no error");
    return ParseErrorKind::unknown_item;
  };
  CHECK(kind_of("Reasoning: nothing to do.", PromptMode::conventional) ==
        ParseErrorKind::missing_task);
  CHECK(kind_of(kSmeltReply, PromptMode::predictive) == ParseErrorKind::missing_response2);
  CHECK(kind_of("Task: Fly to the moon", PromptMode::conventional) ==
        ParseErrorKind::unknown_verb);

  const std::string broken_r2 = std::string("Response1:\n") + kPlaceReply +
                                "\nResponse2:\nReasoning: hmm\n";
  const DualProposal d = parse_planner_output(broken_r2, PromptMode::conventional);
  CHECK_FALSE(d.response2.has_value());
  CHECK(kind_of(broken_r2, PromptMode::predictive) == ParseErrorKind::missing_task);
  CHECK_THROWS_AS(adopt(d, PromptMode::predictive), ParseError);
}

TEST_CASE("labels are case and whitespace tolerant") {
  const DualProposal d = parse_planner_output(
      "  **RESPONSE 1** :\n  reasoning :  x\n  TASK :  place the crafting table\n"
      "response2:\nReasoning: y\nsteps:\n 1) Place the crafting table.\n"
      "2. Do a barrel roll.\npredicted state:\n1. ok\nRISKS:\n1. none\n**Task:** Place the crafting table.",
      PromptMode::predictive);
  CHECK(d.response1.task == T(Verb::place, "crafting_table", 1));
  CHECK(d.response1.reasoning == "x");
  REQUIRE(d.response2.has_value());
  CHECK(d.response2->plan.steps == std::vector<Task>{T(Verb::place, "crafting_table", 1)});
  CHECK(d.response2->plan.unparsed_steps.size() == 1);
}

TEST_CASE("render then parse is the identity on canonical tasks") {
  const Rules& rules = Rules::defaults();
  const auto vocab = rules.vocabulary();
  const std::vector<std::string> items(vocab.begin(), vocab.end());
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    Task t;
    t.verb = static_cast<Verb>(rng() % 6);
    t.item = items[rng() % items.size()];
    t.count = 1 + static_cast<int>(rng() % 12);
    const TaskProposal p{"because " + std::to_string(i), t};
    const DualProposal d = parse_planner_output(render_response(p), PromptMode::conventional);
    REQUIRE_MESSAGE(d.response1 == p, render_response(p));

    const PredictiveProposal r2{{"plan", t}, {{t, t}, {"a", "b"}, {"c", "d"}, {}}};
    const DualProposal both = parse_planner_output(render_dual(p, r2), PromptMode::predictive);
    REQUIRE(both.response2.has_value());
    CHECK(*both.response2 == r2);
  }
}

TEST_CASE("task_match") {
  CHECK_FALSE(task_match(T(Verb::smelt, "raw_gold", 3), T(Verb::place, "furnace", 1)));
  CHECK(task_match(T(Verb::mine, "iron_ore", 3), T(Verb::mine, "iron_ore", 5)));
  CHECK(task_match(T(Verb::obtain, "spruce_log", 1), T(Verb::mine, "wood_log", 2)));
  CHECK(task_match(T(Verb::craft, "oak_planks", 1), T(Verb::craft, "planks", 2)));
  CHECK_FALSE(task_match(T(Verb::craft, "stick", 1), T(Verb::obtain, "stick", 1)));
  CHECK_FALSE(task_match(T(Verb::explore, "iron_ore", 1), T(Verb::mine, "iron_ore", 1)));
  const Task all[] = {T(Verb::smelt, "raw_gold", 3), T(Verb::obtain, "wood_log", 1),
                      T(Verb::mine, "birch_log", 2), T(Verb::place, "furnace", 1)};
  for (const Task& a : all) {
    CHECK(task_match(a, a));
    for (const Task& b : all) CHECK(task_match(a, b) == task_match(b, a));
  }
}

TEST_CASE("match_rate") {
  std::vector<DualProposal> four{
      dual(T(Verb::smelt, "raw_gold", 3), T(Verb::place, "furnace", 1)),
      dual(T(Verb::mine, "iron_ore", 3), T(Verb::mine, "iron_ore", 5)),
      dual(T(Verb::craft, "stick", 4), T(Verb::craft, "planks", 4)),
      dual(T(Verb::explore, "gold_ore", 1), T(Verb::mine, "gold_ore", 1)),
  };
  MatchStats m = match_rate(four);
  CHECK(m.pairs_total == 4);
  CHECK(m.pairs_matched == 1);
  CHECK(m.rate == 0.25);

  // 8 duals, counted by hand: rows 0, 2, 3 and 6 match; row 5 lacks Response2.
  std::vector<DualProposal> eight{
      dual(T(Verb::obtain, "wood_log", 1), T(Verb::mine, "oak_log", 3)),
      dual(T(Verb::smelt, "raw_gold", 3), T(Verb::place, "furnace", 1)),
      dual(T(Verb::craft, "wooden_pickaxe", 1), T(Verb::craft, "wooden_pickaxe", 1)),
      dual(T(Verb::craft, "spruce_planks", 4), T(Verb::craft, "planks", 8)),
      dual(T(Verb::mine, "stone", 3), T(Verb::mine, "cobblestone", 3)),
      dual(T(Verb::craft, "furnace", 1), std::nullopt),
      dual(T(Verb::place, "crafting_table", 1), T(Verb::place, "crafting_table", 1)),
      dual(T(Verb::smelt, "raw_iron", 3), T(Verb::mine, "coal_ore", 1)),
  };
  m = match_rate(eight);
  CHECK(m.pairs_total == 7);
  CHECK(m.pairs_matched == 4);
  CHECK(m.excluded == 1);
  CHECK(m.rate == doctest::Approx(4.0 / 7.0));

  std::vector<DualProposal> same;
  for (const auto& d : eight) {
    if (d.response2) same.push_back(dual(d.response1.task, d.response1.task));
  }
  CHECK(match_rate(same).rate == 1.0);

  CHECK_THROWS_AS(match_rate({}), std::invalid_argument);
  CHECK_THROWS_AS(match_rate({dual(T(Verb::craft, "stick", 1), std::nullopt)}),
                  std::invalid_argument);
}

TEST_CASE("adopt differs exactly when the canonical tasks differ") {
  const DualProposal agree = dual(T(Verb::craft, "stick", 4), T(Verb::craft, "stick", 4));
  CHECK(adopt(agree, PromptMode::conventional).task == adopt(agree, PromptMode::predictive).task);
  const DualProposal differ = dual(T(Verb::craft, "stick", 4), T(Verb::craft, "stick", 2));
  CHECK_FALSE(adopt(differ, PromptMode::conventional).task ==
              adopt(differ, PromptMode::predictive).task);
}

TEST_CASE("milestones") {
  WorldState s = flat_world(20, 20);
  const auto& ms = default_milestones();
  CHECK(ms == std::vector<std::string>{"wooden_pickaxe", "stone_pickaxe", "furnace",
                                       "iron_pickaxe", "gold_ingot", "golden_pickaxe"});
  CHECK(milestone_check(s, ms, {}).empty());
  MilestoneTracker tracker;
  CHECK(tracker.update(s, 1).empty());
  s.inventory.add("wooden_pickaxe", 1);
  CHECK(tracker.update(s, 6) == std::vector<std::string>{"wooden_pickaxe"});
  CHECK(tracker.update(s, 7).empty());
  s.inventory.add("golden_pickaxe", 1);
  s.inventory.add("furnace", 1);
  CHECK(tracker.update(s, 9) == std::vector<std::string>{"furnace", "golden_pickaxe"});
  CHECK(tracker.first_hits().at("wooden_pickaxe") == 6);
  CHECK(tracker.first_hits().at("golden_pickaxe") == 9);

  // A placed furnace counts as acquired.
  WorldState placed = flat_world(20, 20);
  placed.inventory = Inventory{{"furnace", 1}};
  placed.placed_stations.insert({placed.player.x + 1, placed.player.y});
  placed.inventory.remove("furnace", 1);
  placed.set({placed.player.x + 1, placed.player.y}, BlockKind::furnace);
  CHECK(milestone_check(placed, ms, {}) == std::vector<std::string>{"furnace"});
}

TEST_CASE("task history") {
  TaskHistory h;
  h.record("Smelt 3 raw gold.", TaskOutcome::failed(OutcomeReason::no_station_placed, 0));
  h.record("Smelt 3 raw gold.", TaskOutcome::failed(OutcomeReason::no_station_placed, 0));
  CHECK(h.failed() == std::vector<std::string>{"Smelt 3 raw gold."});
  REQUIRE(h.last().has_value());
  CHECK(h.last()->reason == "no_station_placed");
  h.record("Smelt 3 raw gold.", TaskOutcome::done(4));
  CHECK(h.failed().empty());
  CHECK(h.completed() == std::vector<std::string>{"Smelt 3 raw gold."});
  CHECK(h.last()->success);
}

TEST_CASE("build_prompt") {
  const Observation obs = unplaced_furnace_obs();
  TaskHistory h;
  const PromptBundle conv = build_prompt(obs, {}, h, "golden_pickaxe", PromptMode::conventional);
  CHECK(conv.user_text.find("Inventory (3/36): {'furnace': 1, 'raw_gold': 3, 'stick': 2}") !=
        std::string::npos);
  CHECK(conv.user_text.find("Final goal: golden_pickaxe") != std::string::npos);
  CHECK(conv.user_text.find("Visual information") == std::string::npos);
  CHECK(conv.system_text.find("Response2") == std::string::npos);
  CHECK_FALSE(conv.attachment.has_value());

  const PromptBundle pred = build_prompt(obs, {}, h, "golden_pickaxe", PromptMode::predictive);
  CHECK(pred.user_text == conv.user_text);
  CHECK(pred.mode == PromptMode::predictive);
  REQUIRE(pred.system_text.size() > conv.system_text.size());
  CHECK(pred.system_text.substr(0, conv.system_text.size()) == conv.system_text);
  CHECK(pred.system_text.find("Response2:") != std::string::npos);
  CHECK(pred.system_text.find("Response1") != std::string::npos);

  ElementReport rep{"taiga", "day", std::vector<SeenBlock>{{BlockKind::spruce_log, 1, 1}},
                    std::vector<SeenEntity>{}};
  const PromptBundle el = build_prompt(obs, rep, h, "golden_pickaxe", PromptMode::conventional);
  CHECK(el.user_text.find(render_elements(rep)) != std::string::npos);

  const VisualFrame frame = render_frame(flat_world(20, 20));
  const PromptBundle direct = build_prompt(obs, frame, h, "golden_pickaxe", PromptMode::conventional);
  REQUIRE(direct.attachment.has_value());
  CHECK(*direct.attachment == frame);

  const PromptBundle free = build_prompt(obs, FreeDescription{"", true}, h, "golden_pickaxe",
                                         PromptMode::conventional);
  CHECK(free.user_text.find("N/A") != std::string::npos);

  CHECK_THROWS_AS(build_prompt(obs, {}, h, "", PromptMode::conventional), std::invalid_argument);
  CHECK(build_prompt(obs, {}, h, "golden_pickaxe", PromptMode::conventional) == conv);
}

TEST_CASE("read_prompt_state recovers the observation from a prompt") {
  Observation obs = unplaced_furnace_obs();
  obs.equipment = "iron_pickaxe";
  TaskHistory h;
  h.record("Mine 3 gold ore.", TaskOutcome::done(20));
  h.record("Smelt 3 raw gold.", TaskOutcome::failed(OutcomeReason::no_station_placed, 0));
  ElementReport rep{"taiga", "day", std::vector<SeenBlock>{{BlockKind::iron_ore, 1, 1}},
                    std::vector<SeenEntity>{}};
  const PromptBundle b = build_prompt(obs, rep, h, "golden_pickaxe", PromptMode::predictive);
  const PromptState st = read_prompt_state(b.user_text);
  CHECK(st.inventory == obs.inventory);
  CHECK(st.nearby_blocks == std::set<std::string>{"gold_ore", "stone"});
  CHECK(st.equipment == "iron_pickaxe");
  CHECK(st.goal == "golden_pickaxe");
  CHECK(st.completed == std::vector<std::string>{"Mine 3 gold ore."});
  CHECK(st.failed == std::vector<std::string>{"Smelt 3 raw gold."});
  REQUIRE(st.last.has_value());
  CHECK(*st.last == LastOutcome{"Smelt 3 raw gold.", false, "no_station_placed"});

  Observation empty;
  const PromptState e =
      read_prompt_state(build_prompt(empty, {}, {}, "golden_pickaxe", PromptMode::conventional).user_text);
  CHECK(e.inventory.items().empty());
  CHECK(e.nearby_blocks.empty());
  CHECK_FALSE(e.last.has_value());
  CHECK_THROWS_AS(read_prompt_state("hello"), std::invalid_argument);
}

TEST_CASE("bundle JSON and hash") {
  const PromptBundle b = build_prompt(unplaced_furnace_obs(), render_frame(flat_world(20, 20)), {},
                                      "golden_pickaxe", PromptMode::predictive);
  CHECK(bundle_from_json(to_json(b)) == b);
  CHECK(bundle_hash(b) == bundle_hash(bundle_from_json(to_json(b))));
  PromptBundle edited = b;
  edited.system_text += " ";
  CHECK(bundle_hash(edited) != bundle_hash(b));
  CHECK(bundle_hash(b).size() == 64);

  const DualProposal d = dual(T(Verb::craft, "stick", 4), T(Verb::place, "furnace", 1));
  CHECK(dual_from_json(to_json(d)) == d);
  CHECK(dual_from_json(to_json(dual(T(Verb::craft, "stick", 4), std::nullopt))).response2 ==
        std::nullopt);
}
