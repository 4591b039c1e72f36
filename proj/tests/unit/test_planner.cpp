#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "craftagent/craftworld/executor.hpp"
#include "craftagent/planner/planner.hpp"

using namespace craftagent;

namespace {

Task T(Verb v, const char* item, int n) { return Task{v, item, n}; }

PromptState fixture_state(Inventory inv, std::set<std::string> nearby = {}) {
  PromptState st;
  st.inventory = std::move(inv);
  st.nearby_blocks = std::move(nearby);
  st.goal = "golden_pickaxe";
  return st;
}

PromptState unplaced_furnace() {
  return fixture_state(Inventory{{"raw_gold", 3}, {"stick", 2}, {"furnace", 1}});
}

// Runs every step of the predictive plan from `s`; returns the index of the
// first failing step or -1.
int replay_plan(WorldState& s, const PredictionPlan& plan) {
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const TaskOutcome out = execute_task(s, plan.steps[i], kDefaultStepBudget);
    if (!out.success) return static_cast<int>(i);
  }
  return -1;
}

class StubServer {
 public:
  explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat", [this, handler](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(req.body);
        auth_ = req.get_header_value("Authorization");
      }
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat"; }
  std::vector<std::string> bodies() {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  std::string auth() {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  std::vector<std::string> bodies_;
  std::string auth_;
};

HttpConfig quick(const std::string& url) {
  HttpConfig c;
  c.url = url;
  c.credential_env = "CRAFTAGENT_TEST_KEY";
  c.backoff_initial = std::chrono::milliseconds(1);
  c.backoff_max = std::chrono::milliseconds(4);
  c.timeout = std::chrono::milliseconds(2000);
  return c;
}

std::string reply(const std::string& text) {
  return nlohmann::json{{"text", text},
                        {"finish_reason", "stop"},
                        {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 5}}}}
      .dump();
}

const char* kSmeltText =
    "Reasoning: The player has mined gold ore but has not smelted it yet.\n\nTask: Smelt 3 raw gold.";

}  // namespace

TEST_CASE("conventional oracle") {
  CHECK(oracle_conventional(unplaced_furnace()).task == T(Verb::smelt, "raw_gold", 3));
  CHECK(render_task(oracle_conventional(fixture_state({})).task) == "Obtain a wood log.");
  CHECK(oracle_conventional(fixture_state({{"gold_ingot", 3}, {"stick", 2}}, {"crafting_table"}))
            .task == T(Verb::craft, "golden_pickaxe", 1));
  // Tiers gate mining: raw iron needs a stone pickaxe first.
  CHECK(oracle_conventional(
            fixture_state({{"wooden_pickaxe", 1}, {"stick", 2}, {"cobblestone", 3}}))
            .task == T(Verb::craft, "stone_pickaxe", 1));
  CHECK(oracle_conventional(fixture_state({{"stone_pickaxe", 1}, {"stick", 4}})).task ==
        T(Verb::mine, "iron_ore", 3));

  SUBCASE("reacts to a repeated failure") {
    PromptState st = unplaced_furnace();
    st.last = LastOutcome{"Smelt 3 raw gold.", false, "no_station_placed"};
    CHECK(oracle_conventional(st).task == T(Verb::place, "furnace", 1));
    st.inventory.remove("furnace", 1);
    st.nearby_blocks.insert("furnace");
    st.last = LastOutcome{"Smelt 3 raw gold.", false, "missing_ingredients"};
    const Task fuel = oracle_conventional(st).task;
    CHECK((fuel.item == "wood_log" || fuel.item == "planks"));
    st.last->success = true;
    CHECK(oracle_conventional(st).task == T(Verb::smelt, "raw_gold", 3));
  }
}

TEST_CASE("predictive oracle") {
  const PredictiveProposal p = oracle_predictive(unplaced_furnace());
  CHECK(p.proposal.task == T(Verb::place, "furnace", 1));
  CHECK(p.plan.steps.front() == p.proposal.task);
  CHECK(p.plan.steps.back() == T(Verb::craft, "golden_pickaxe", 1));
  CHECK(p.plan.predicted_state_changes.size() == p.plan.steps.size());
  CHECK(p.plan.risks.size() == p.plan.steps.size());

  const PromptState ready = fixture_state({{"gold_ingot", 3}, {"stick", 2}}, {"crafting_table"});
  CHECK(oracle_predictive(ready).proposal.task == oracle_conventional(ready).task);

  const PredictiveProposal fresh = oracle_predictive(fixture_state({}));
  REQUIRE(fresh.plan.steps.size() > 10);
  CHECK(fresh.plan.steps[0].verb == Verb::obtain);
  CHECK(fresh.plan.steps[0].item == "wood_log");
  CHECK(fresh.plan.steps[1].verb == Verb::craft);
  CHECK(fresh.plan.steps[1].item == "planks");
  CHECK(fresh.plan.steps.back() == T(Verb::craft, "golden_pickaxe", 1));
  CHECK(oracle_predictive(fixture_state({})) == fresh);
}

TEST_CASE("predictive plans replay cleanly on generated worlds") {
  for (std::uint64_t seed : {7u, 11u, 23u}) {
    WorldState s = generate_world(seed);
    const PredictiveProposal p = oracle_predictive(prompt_state_of(observe_cheat(s), "golden_pickaxe"));
    CHECK_MESSAGE(replay_plan(s, p.plan) == -1, "seed " << seed);
    CHECK(goal_reached(s));
  }
}

TEST_CASE("the conventional proposal fails where the predictive one succeeds") {
  WorldState s = flat_world(20, 20);
  s.inventory = Inventory{{"raw_gold", 3}, {"stick", 2}, {"furnace", 1}};
  const PromptState st = prompt_state_of(observe_cheat(s), "golden_pickaxe");
  const Task r1 = oracle_conventional(st).task;
  const Task r2 = oracle_predictive(st).proposal.task;
  WorldState a = s;
  CHECK(execute_task(a, r1, kDefaultStepBudget).reason == OutcomeReason::no_station_placed);
  WorldState b = s;
  CHECK(execute_task(b, r2, kDefaultStepBudget).success);
  CHECK_FALSE(task_match(r1, r2));
}

TEST_CASE("oracle backend answers in the requested format") {
  WorldState s = generate_world(7);
  const Observation obs = observe_cheat(s);
  OracleBackend oracle;
  const PromptBundle conv = build_prompt(obs, {}, {}, "golden_pickaxe", PromptMode::conventional);
  const std::string text = oracle.propose(conv);
  CHECK(text == oracle.propose(conv));
  const DualProposal d1 = parse_planner_output(text, PromptMode::conventional);
  CHECK_FALSE(d1.response2.has_value());
  CHECK(d1.response1.task == T(Verb::obtain, "wood_log", 1));

  const PromptBundle pred = build_prompt(obs, {}, {}, "golden_pickaxe", PromptMode::predictive);
  const DualProposal d2 = parse_planner_output(oracle.propose(pred), PromptMode::predictive);
  REQUIRE(d2.response2.has_value());
  CHECK(d2.response2->plan.unparsed_steps.empty());
  CHECK(d2.response2->plan == oracle_predictive(prompt_state_of(obs, "golden_pickaxe")).plan);
  CHECK(oracle.descriptor().deterministic);

  WorldState ore = flat_world(20, 20);
  ore.set({ore.player.x + 2, ore.player.y}, BlockKind::gold_ore);
  PromptBundle vision;
  vision.purpose = PromptPurpose::vision_description;
  vision.user_text = vision_prompt("golden_pickaxe");
  vision.attachment = render_frame(ore);
  CHECK(oracle.propose(vision).find("gold_ore") != std::string::npos);
}

TEST_CASE("chat request mapping and schema") {
  HttpConfig cfg;
  PromptBundle b = build_prompt(Observation{}, {}, {}, "golden_pickaxe", PromptMode::conventional);
  nlohmann::json req = chat_request(b, cfg);
  CHECK(req["messages"].size() == 2);
  CHECK(req["messages"][0]["role"] == "system");
  CHECK(req["messages"][1]["content"] == b.user_text);
  CHECK(req["temperature"] == 0.0);
  CHECK(validate_chat_request(req).empty());

  b.attachment = render_frame(flat_world(20, 20));
  req = chat_request(b, cfg);
  CHECK(req["messages"][1]["attachment"] == b.attachment->serialize());
  CHECK(validate_chat_request(req).empty());

  PromptBundle v;
  v.purpose = PromptPurpose::vision_description;
  v.user_text = "describe";
  CHECK(chat_request(v, cfg)["messages"].size() == 1);

  nlohmann::json bad = req;
  bad["messages"][0]["role"] = "tool";
  CHECK_FALSE(validate_chat_request(bad).empty());
  bad = req;
  bad.erase("model");
  CHECK_FALSE(validate_chat_request(bad).empty());
  bad = req;
  bad["max_tokens"] = -1;
  CHECK_FALSE(validate_chat_request(bad).empty());
  bad = req;
  bad["messages"][0]["attachment"] = "x";
  CHECK_FALSE(validate_chat_request(bad).empty());
  bad = req;
  bad["extra"] = 1;
  CHECK_FALSE(validate_chat_request(bad).empty());

  CHECK(parse_chat_response(reply("hi")).text == "hi");
  CHECK_THROWS_AS(parse_chat_response("{"), TransportError);
  CHECK_THROWS_AS(parse_chat_response(R"({"finish_reason":"stop"})"), TransportError);
}

TEST_CASE("http backend against a local stub") {
  setenv("CRAFTAGENT_TEST_KEY", "secret-token", 1);

  SUBCASE("returns the response text verbatim") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(reply(kSmeltText), "application/json");
    });
    HttpBackend http(quick(server.url()));
    const PromptBundle b = build_prompt(Observation{}, {}, {}, "golden_pickaxe", PromptMode::conventional);
    CHECK(http.propose(b) == kSmeltText);
    CHECK(server.auth() == "Bearer secret-token");
    const auto bodies = server.bodies();
    REQUIRE(bodies.size() == 1);
    const auto sent = nlohmann::json::parse(bodies[0]);
    CHECK(validate_chat_request(sent).empty());
    CHECK(bodies[0].find("secret-token") == std::string::npos);
  }
  SUBCASE("three 500s with a retry cap of 2 give a typed error") {
    StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    HttpBackend http(quick(server.url()));
    try {
      http.propose(PromptBundle{});
      FAIL("expected a transport error");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::http_status);
      CHECK(e.status() == 500);
    }
    CHECK(server.bodies().size() == 3);
    CHECK(http.attempts_made() == 3);
  }
  SUBCASE("a transient failure is retried") {
    std::atomic<int> calls{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
      if (calls++ == 0) {
        res.status = 503;
      } else {
        res.set_content(reply("ok"), "application/json");
      }
    });
    HttpBackend http(quick(server.url()));
    CHECK(http.propose(PromptBundle{}) == "ok");
    CHECK(calls == 2);
  }
  SUBCASE("client errors are not retried") {
    StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 400; });
    HttpBackend http(quick(server.url()));
    CHECK_THROWS_AS(http.propose(PromptBundle{}), TransportError);
    CHECK(server.bodies().size() == 1);
  }
  SUBCASE("malformed body") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "application/json");
    });
    HttpBackend http(quick(server.url()));
    try {
      http.propose(PromptBundle{});
      FAIL("expected a transport error");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::malformed_body);
    }
  }
  SUBCASE("timeout") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(400));
      res.set_content(reply("late"), "application/json");
    });
    HttpConfig cfg = quick(server.url());
    cfg.timeout = std::chrono::milliseconds(100);
    cfg.retries = 0;
    HttpBackend http(cfg);
    try {
      http.propose(PromptBundle{});
      FAIL("expected a transport error");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::timeout);
    }
  }
  SUBCASE("configuration errors") {
    HttpConfig cfg = quick("http://127.0.0.1:1/v1/chat");
    cfg.credential_env = "CRAFTAGENT_TEST_UNSET_KEY";
    unsetenv("CRAFTAGENT_TEST_UNSET_KEY");
    CHECK_THROWS_AS(HttpBackend{cfg}, ConfigError);
    cfg = quick("ftp://nowhere");
    CHECK_THROWS_AS(HttpBackend{cfg}, ConfigError);
    CHECK_THROWS_AS(HttpConfig::from_json({{"retries", -1}}), ConfigError);
    CHECK_THROWS_AS(HttpConfig::from_json({{"bogus", 1}}), ConfigError);
    CHECK(HttpConfig::from_json(HttpConfig{}.to_json()).model == HttpConfig{}.model);
  }
  SUBCASE("connection refused") {
    HttpConfig cfg = quick("http://127.0.0.1:1/v1/chat");
    cfg.retries = 1;
    HttpBackend http(cfg);
    try {
      http.propose(PromptBundle{});
      FAIL("expected a transport error");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::connection);
    }
  }
}

TEST_CASE("playback") {
  OracleBackend oracle;
  RecordingBackend rec(oracle);
  const Observation obs = observe_cheat(generate_world(3));
  const PromptBundle a = build_prompt(obs, {}, {}, "golden_pickaxe", PromptMode::predictive);
  TaskHistory h;
  h.record("Obtain a wood log.", TaskOutcome::done(5));
  const PromptBundle b = build_prompt(obs, {}, h, "golden_pickaxe", PromptMode::predictive);
  const std::string ra = rec.propose(a);
  const std::string rb = rec.propose(b);
  const std::vector<Exchange> log = rec.drain();
  REQUIRE(log.size() == 2);
  CHECK(rec.drain().empty());
  CHECK(log[0].prompt_hash == bundle_hash(a));
  CHECK(Exchange::from_json(log[1].to_json()) == log[1]);

  SUBCASE("identical bundles replay with no mismatches") {
    PlaybackBackend play(log, true);
    CHECK(play.propose(a) == ra);
    CHECK(play.propose(b) == rb);
    CHECK(play.mismatches().empty());
    try {
      play.propose(b);
      FAIL("expected exhaustion");
    } catch (const PlaybackError& e) {
      CHECK(e.kind() == PlaybackError::Kind::exhausted);
    }
  }
  SUBCASE("an edited template is flagged at the first call") {
    PromptBundle edited = a;
    edited.system_text += "\nBe brief.";
    PlaybackBackend lenient(log, false);
    CHECK(lenient.propose(edited) == ra);
    CHECK(lenient.mismatches() == std::vector<std::size_t>{0});
    PlaybackBackend strict(log, true);
    CHECK_THROWS_AS(strict.propose(edited), PlaybackError);
  }
  SUBCASE("recorded transport errors are reproduced") {
    std::vector<Exchange> failed{{PromptPurpose::curriculum, bundle_hash(a), std::nullopt, "timeout"}};
    PlaybackBackend play(failed, true);
    try {
      play.propose(a);
      FAIL("expected a transport error");
    } catch (const TransportError& e) {
      CHECK(e.kind() == TransportError::Kind::timeout);
    }
  }
}
