#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

#include "craftagent/curriculum/curriculum.hpp"
#include "craftagent/planner/backend.hpp"

namespace craftagent {

// ---- oracle ---------------------------------------------------------------

// One-level backward chaining over the recipe graph, inputs in table order.
// Mining tiers are respected; stations and fuel are not looked at. When the
// same task failed on the previous iteration it reacts to the reported
// reason instead of repeating it.
TaskProposal oracle_conventional(const PromptState& state, const Rules& rules = Rules::defaults());

// Full plan to the goal by forward simulation of recipes, stations, fuel
// and tiers. The proposal is the plan's first step.
PredictiveProposal oracle_predictive(const PromptState& state,
                                     const Rules& rules = Rules::defaults());

PromptState prompt_state_of(const Observation& obs, std::string_view goal);

// Deterministic stand-in for a chat model. Reads only the bundle text, and
// the frame for vision-description requests.
class OracleBackend : public PlannerBackend {
 public:
  explicit OracleBackend(Rules rules = Rules::defaults()) : rules_(std::move(rules)) {}
  std::string propose(const PromptBundle& bundle) override;
  BackendDescriptor descriptor() const override { return {"oracle", "oracle-1", true}; }

 private:
  Rules rules_;
};

// ---- wire format ----------------------------------------------------------

struct HttpConfig {
  std::string url = "http://127.0.0.1:8080/v1/chat";
  std::string model = "gpt-4o-2024-05-13";
  std::string credential_env = "CRAFTAGENT_API_KEY";  // empty: send no credential
  double temperature = 0.0;
  int max_tokens = 1024;
  int retries = 2;  // attempts = 1 + retries
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds backoff_initial{250};
  std::chrono::milliseconds backoff_max{4000};
  int max_in_flight = 4;

  nlohmann::json to_json() const;
  static HttpConfig from_json(const nlohmann::json& j);  // throws ConfigError
};

nlohmann::json chat_request(const PromptBundle& bundle, const HttpConfig& config);

// Empty when `request` conforms to the documented request schema.
std::vector<std::string> validate_chat_request(const nlohmann::json& request);

struct ChatResponse {
  std::string text;
  std::string finish_reason;
  nlohmann::json usage;
};

// Throws TransportError(malformed_body).
ChatResponse parse_chat_response(std::string_view body);

class HttpBackend : public PlannerBackend {
 public:
  // Throws ConfigError for a bad URL or a missing credential.
  explicit HttpBackend(HttpConfig config);
  std::string propose(const PromptBundle& bundle) override;
  BackendDescriptor descriptor() const override { return {"http", config_.model, false}; }

  int attempts_made() const;

 private:
  std::string attempt(const std::string& body);

  HttpConfig config_;
  std::string origin_;
  std::string path_;
  std::string credential_;
  std::counting_semaphore<256> in_flight_;
  mutable std::mutex mu_;
  int attempts_ = 0;
};

// ---- playback -------------------------------------------------------------

// One backend call as recorded in a transcript.
struct Exchange {
  PromptPurpose purpose = PromptPurpose::curriculum;
  std::string prompt_hash;
  std::optional<std::string> response;
  std::optional<std::string> error;  // TransportError kind when the call failed

  nlohmann::json to_json() const;
  static Exchange from_json(const nlohmann::json& j);
  friend bool operator==(const Exchange&, const Exchange&) = default;
};

class PlaybackError : public std::runtime_error {
 public:
  enum class Kind { exhausted, hash_mismatch };
  PlaybackError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class PlaybackBackend : public PlannerBackend {
 public:
  PlaybackBackend(std::vector<Exchange> exchanges, bool strict)
      : exchanges_(std::move(exchanges)), strict_(strict) {}

  std::string propose(const PromptBundle& bundle) override;
  BackendDescriptor descriptor() const override { return {"playback", "transcript", true}; }

  std::size_t cursor() const { return cursor_; }
  // Cursor positions (0-based) whose recorded hash did not match.
  const std::vector<std::size_t>& mismatches() const { return mismatches_; }

 private:
  std::vector<Exchange> exchanges_;
  bool strict_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> mismatches_;
};

// Wraps a backend and records every call.
class RecordingBackend : public PlannerBackend {
 public:
  explicit RecordingBackend(PlannerBackend& inner) : inner_(inner) {}
  std::string propose(const PromptBundle& bundle) override;
  BackendDescriptor descriptor() const override { return inner_.descriptor(); }

  // Moves out the calls since the last drain.
  std::vector<Exchange> drain();

 private:
  PlannerBackend& inner_;
  std::vector<Exchange> log_;
};

}  // namespace craftagent
