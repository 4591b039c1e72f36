#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "craftagent/perception/perception.hpp"

namespace craftagent {

enum class PromptMode : std::uint8_t { conventional, predictive };
enum class PromptPurpose : std::uint8_t { curriculum, vision_description };

inline std::string_view to_string(PromptMode m) {
  return m == PromptMode::predictive ? "predictive" : "conventional";
}
inline std::optional<PromptMode> prompt_mode_from_string(std::string_view s) {
  if (s == "conventional") return PromptMode::conventional;
  if (s == "predictive") return PromptMode::predictive;
  return std::nullopt;
}
inline std::string_view to_string(PromptPurpose p) {
  return p == PromptPurpose::vision_description ? "vision_description" : "curriculum";
}
inline std::optional<PromptPurpose> prompt_purpose_from_string(std::string_view s) {
  if (s == "curriculum") return PromptPurpose::curriculum;
  if (s == "vision_description") return PromptPurpose::vision_description;
  return std::nullopt;
}

// One planner request. An attachment is only present for direct-vision
// curriculum prompts and for vision-description requests.
struct PromptBundle {
  std::string system_text;
  std::string user_text;
  PromptMode mode = PromptMode::conventional;
  PromptPurpose purpose = PromptPurpose::curriculum;
  std::optional<VisualFrame> attachment;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

struct BackendDescriptor {
  std::string name;
  std::string model;
  bool deterministic = false;
};

class TransportError : public std::runtime_error {
 public:
  enum class Kind { timeout, http_status, malformed_body, connection };

  TransportError(Kind kind, const std::string& what, int status = 0)
      : std::runtime_error(what), kind_(kind), status_(status) {}

  Kind kind() const { return kind_; }
  int status() const { return status_; }

 private:
  Kind kind_;
  int status_;
};

inline std::string_view to_string(TransportError::Kind k) {
  switch (k) {
    case TransportError::Kind::timeout:
      return "timeout";
    case TransportError::Kind::http_status:
      return "http_status";
    case TransportError::Kind::malformed_body:
      return "malformed_body";
    case TransportError::Kind::connection:
      return "connection";
  }
  return "connection";
}

// Produces raw response text for a bundle. Implementations must not modify
// the bundle; deterministic backends return identical text for identical
// bundles.
class PlannerBackend {
 public:
  virtual ~PlannerBackend() = default;
  virtual std::string propose(const PromptBundle& bundle) = 0;
  virtual BackendDescriptor descriptor() const = 0;
};

}  // namespace craftagent
