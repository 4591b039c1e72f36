#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <thread>

#include "craftagent/planner/planner.hpp"

namespace craftagent {

using nlohmann::json;

json HttpConfig::to_json() const {
  return {{"url", url},
          {"model", model},
          {"credential_env", credential_env},
          {"temperature", temperature},
          {"max_tokens", max_tokens},
          {"retries", retries},
          {"timeout_ms", timeout.count()},
          {"backoff_initial_ms", backoff_initial.count()},
          {"backoff_max_ms", backoff_max.count()},
          {"max_in_flight", max_in_flight}};
}

HttpConfig HttpConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("http config must be an object");
  HttpConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "url") c.url = v.get<std::string>();
      else if (key == "model") c.model = v.get<std::string>();
      else if (key == "credential_env") c.credential_env = v.get<std::string>();
      else if (key == "temperature") c.temperature = v.get<double>();
      else if (key == "max_tokens") c.max_tokens = v.get<int>();
      else if (key == "retries") c.retries = v.get<int>();
      else if (key == "timeout_ms") c.timeout = std::chrono::milliseconds(v.get<int>());
      else if (key == "backoff_initial_ms") c.backoff_initial = std::chrono::milliseconds(v.get<int>());
      else if (key == "backoff_max_ms") c.backoff_max = std::chrono::milliseconds(v.get<int>());
      else if (key == "max_in_flight") c.max_in_flight = v.get<int>();
      else throw ConfigError("unknown http config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("http config: ") + e.what());
  }
  if (c.retries < 0 || c.max_tokens < 1 || c.timeout.count() < 1 || c.max_in_flight < 1 ||
      c.max_in_flight > 256 || c.temperature < 0.0 || c.temperature > 2.0 ||
      c.backoff_initial.count() < 0 || c.backoff_max < c.backoff_initial) {
    throw ConfigError("http config out of range");
  }
  return c;
}

json chat_request(const PromptBundle& bundle, const HttpConfig& config) {
  json messages = json::array();
  if (!bundle.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", bundle.system_text}});
  }
  json user = {{"role", "user"}, {"content", bundle.user_text}};
  if (bundle.attachment) user["attachment"] = bundle.attachment->serialize();
  messages.push_back(std::move(user));
  return {{"model", config.model},
          {"messages", std::move(messages)},
          {"temperature", config.temperature},
          {"max_tokens", config.max_tokens}};
}

std::vector<std::string> validate_chat_request(const json& req) {
  std::vector<std::string> errs;
  if (!req.is_object()) return {"request is not an object"};
  for (const auto& [key, v] : req.items()) {
    if (key != "model" && key != "messages" && key != "temperature" && key != "max_tokens") {
      errs.push_back("unexpected field '" + key + "'");
    }
  }
  if (!req.contains("model") || !req["model"].is_string() || req["model"].get<std::string>().empty()) {
    errs.push_back("model must be a non-empty string");
  }
  if (!req.contains("temperature") || !req["temperature"].is_number() ||
      req["temperature"].get<double>() < 0.0 || req["temperature"].get<double>() > 2.0) {
    errs.push_back("temperature must be a number in [0, 2]");
  }
  if (!req.contains("max_tokens") || !req["max_tokens"].is_number_integer() ||
      req["max_tokens"].get<long long>() < 1) {
    errs.push_back("max_tokens must be a positive integer");
  }
  if (!req.contains("messages") || !req["messages"].is_array() || req["messages"].empty()) {
    errs.push_back("messages must be a non-empty array");
    return errs;
  }
  for (std::size_t i = 0; i < req["messages"].size(); ++i) {
    const json& m = req["messages"][i];
    const std::string at = "messages[" + std::to_string(i) + "]";
    if (!m.is_object()) {
      errs.push_back(at + " is not an object");
      continue;
    }
    for (const auto& [key, v] : m.items()) {
      if (key != "role" && key != "content" && key != "attachment") {
        errs.push_back(at + " has unexpected field '" + key + "'");
      }
    }
    const std::string role = m.contains("role") && m["role"].is_string() ? m["role"].get<std::string>() : "";
    if (role != "system" && role != "user" && role != "assistant") {
      errs.push_back(at + ".role must be system, user or assistant");
    }
    if (!m.contains("content") || !m["content"].is_string()) errs.push_back(at + ".content must be a string");
    if (m.contains("attachment")) {
      if (role != "user" || !m["attachment"].is_string()) {
        errs.push_back(at + ".attachment must be a frame string on a user message");
      } else {
        try {
          VisualFrame::parse(m["attachment"].get<std::string>());
        } catch (const std::invalid_argument& e) {
          errs.push_back(at + ".attachment: " + e.what());
        }
      }
    }
  }
  return errs;
}

ChatResponse parse_chat_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw TransportError(TransportError::Kind::malformed_body, "response body is not JSON");
  }
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw TransportError(TransportError::Kind::malformed_body, "response has no text field");
  }
  ChatResponse r;
  r.text = j["text"].get<std::string>();
  if (j.contains("finish_reason") && j["finish_reason"].is_string()) {
    r.finish_reason = j["finish_reason"].get<std::string>();
  }
  if (j.contains("usage")) r.usage = j["usage"];
  return r;
}

HttpBackend::HttpBackend(HttpConfig config)
    : config_(std::move(config)), in_flight_(std::clamp(config_.max_in_flight, 1, 256)) {
  static const std::regex url_re(R"(^(https?)://([^/:]+)(:\d+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, url_re)) {
    throw ConfigError("bad endpoint url '" + config_.url + "'");
  }
  origin_ = m[1].str() + "://" + m[2].str() + m[3].str();
  path_ = m[4].matched ? m[4].str() : "/";
  if (!config_.credential_env.empty()) {
    const char* v = std::getenv(config_.credential_env.c_str());
    if (v == nullptr || *v == '\0') {
      throw ConfigError("credential variable " + config_.credential_env + " is not set");
    }
    credential_ = v;
  }
}

int HttpBackend::attempts_made() const {
  std::lock_guard lock(mu_);
  return attempts_;
}

namespace {

bool transient(const TransportError& e) {
  switch (e.kind()) {
    case TransportError::Kind::timeout:
    case TransportError::Kind::connection:
      return true;
    case TransportError::Kind::http_status:
      return e.status() >= 500 || e.status() == 429;
    case TransportError::Kind::malformed_body:
      return false;
  }
  return false;
}

}  // namespace

std::string HttpBackend::attempt(const std::string& body) {
  {
    std::lock_guard lock(mu_);
    ++attempts_;
  }
  httplib::Client cli(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);

  const auto start = std::chrono::steady_clock::now();
  auto res = cli.Post(path_, headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const bool slow = std::chrono::steady_clock::now() - start >= config_.timeout * 9 / 10;
    if (err == httplib::Error::ConnectionTimeout ||
        ((err == httplib::Error::Read || err == httplib::Error::Write) && slow)) {
      throw TransportError(TransportError::Kind::timeout, "request timed out");
    }
    throw TransportError(TransportError::Kind::connection, "transport: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError(TransportError::Kind::http_status,
                         "endpoint answered HTTP " + std::to_string(res->status), res->status);
  }
  return parse_chat_response(res->body).text;
}

std::string HttpBackend::propose(const PromptBundle& bundle) {
  const std::string body = chat_request(bundle, config_).dump();
  auto delay = config_.backoff_initial;
  for (int tries = 0;; ++tries) {
    try {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<256>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      return attempt(body);
    } catch (const TransportError& e) {
      if (tries >= config_.retries || !transient(e)) throw;
    }
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, config_.backoff_max);
  }
}

}  // namespace craftagent
