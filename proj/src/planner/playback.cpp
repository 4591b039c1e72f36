#include "craftagent/planner/planner.hpp"

namespace craftagent {

using nlohmann::json;

json Exchange::to_json() const {
  return {{"purpose", to_string(purpose)},
          {"prompt_hash", prompt_hash},
          {"response", response ? json(*response) : json(nullptr)},
          {"error", error ? json(*error) : json(nullptr)}};
}

Exchange Exchange::from_json(const json& j) {
  Exchange e;
  const auto purpose = prompt_purpose_from_string(j.at("purpose").get<std::string>());
  if (!purpose) throw std::invalid_argument("bad exchange purpose");
  e.purpose = *purpose;
  e.prompt_hash = j.at("prompt_hash").get<std::string>();
  if (j.contains("response") && !j["response"].is_null()) e.response = j["response"].get<std::string>();
  if (j.contains("error") && !j["error"].is_null()) e.error = j["error"].get<std::string>();
  return e;
}

namespace {

TransportError::Kind kind_from(std::string_view s) {
  for (auto k : {TransportError::Kind::timeout, TransportError::Kind::http_status,
                 TransportError::Kind::malformed_body}) {
    if (to_string(k) == s) return k;
  }
  return TransportError::Kind::connection;
}

}  // namespace

std::string PlaybackBackend::propose(const PromptBundle& bundle) {
  if (cursor_ >= exchanges_.size()) {
    throw PlaybackError(PlaybackError::Kind::exhausted,
                        "transcript exhausted after " + std::to_string(exchanges_.size()) + " calls");
  }
  const Exchange& e = exchanges_[cursor_];
  if (e.prompt_hash != bundle_hash(bundle) || e.purpose != bundle.purpose) {
    mismatches_.push_back(cursor_);
    if (strict_) {
      throw PlaybackError(PlaybackError::Kind::hash_mismatch,
                          "prompt hash mismatch at call " + std::to_string(cursor_ + 1));
    }
  }
  ++cursor_;
  if (e.error) throw TransportError(kind_from(*e.error), "recorded failure: " + *e.error);
  return e.response.value_or("");
}

std::string RecordingBackend::propose(const PromptBundle& bundle) {
  Exchange e;
  e.purpose = bundle.purpose;
  e.prompt_hash = bundle_hash(bundle);
  try {
    e.response = inner_.propose(bundle);
  } catch (const TransportError& err) {
    e.error = std::string(to_string(err.kind()));
    log_.push_back(std::move(e));
    throw;
  }
  log_.push_back(e);
  return *e.response;
}

std::vector<Exchange> RecordingBackend::drain() {
  std::vector<Exchange> out;
  out.swap(log_);
  return out;
}

}  // namespace craftagent
