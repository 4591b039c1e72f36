#include "craftagent/curriculum/curriculum.hpp"
#include "craftagent/util/hash.hpp"

namespace craftagent {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return j.at(key).get<T>();
}

}  // namespace

json to_json(const PromptBundle& b) {
  return {{"system_text", b.system_text},
          {"user_text", b.user_text},
          {"mode", to_string(b.mode)},
          {"purpose", to_string(b.purpose)},
          {"attachment", b.attachment ? json(b.attachment->serialize()) : json(nullptr)}};
}

PromptBundle bundle_from_json(const json& j) {
  PromptBundle b;
  b.system_text = required<std::string>(j, "system_text");
  b.user_text = required<std::string>(j, "user_text");
  const auto mode = prompt_mode_from_string(required<std::string>(j, "mode"));
  const auto purpose = prompt_purpose_from_string(required<std::string>(j, "purpose"));
  if (!mode || !purpose) throw std::invalid_argument("bad bundle mode or purpose");
  b.mode = *mode;
  b.purpose = *purpose;
  if (j.contains("attachment") && !j.at("attachment").is_null()) {
    b.attachment = VisualFrame::parse(j.at("attachment").get<std::string>());
  }
  return b;
}

std::string bundle_hash(const PromptBundle& bundle) { return sha256_hex(to_json(bundle).dump()); }

json to_json(const Task& t) {
  return {{"verb", to_string(t.verb)}, {"item", t.item}, {"count", t.count}};
}

Task task_from_json(const json& j) {
  const auto verb = verb_from_string(required<std::string>(j, "verb"));
  if (!verb) throw std::invalid_argument("bad task verb");
  return {*verb, required<std::string>(j, "item"), required<int>(j, "count")};
}

namespace {

json strings(const std::vector<std::string>& v) { return json(v); }

}  // namespace

json to_json(const DualProposal& d) {
  json out = {{"response1", {{"reasoning", d.response1.reasoning}, {"task", to_json(d.response1.task)}}}};
  if (!d.response2) {
    out["response2"] = nullptr;
    return out;
  }
  json steps = json::array();
  for (const Task& t : d.response2->plan.steps) steps.push_back(to_json(t));
  out["response2"] = {{"reasoning", d.response2->proposal.reasoning},
                      {"task", to_json(d.response2->proposal.task)},
                      {"steps", steps},
                      {"predicted_state_changes", strings(d.response2->plan.predicted_state_changes)},
                      {"risks", strings(d.response2->plan.risks)},
                      {"unparsed_steps", strings(d.response2->plan.unparsed_steps)}};
  return out;
}

DualProposal dual_from_json(const json& j) {
  DualProposal d;
  const json& r1 = j.at("response1");
  d.response1 = {required<std::string>(r1, "reasoning"), task_from_json(r1.at("task"))};
  if (j.contains("response2") && !j.at("response2").is_null()) {
    const json& r2 = j.at("response2");
    PredictiveProposal p;
    p.proposal = {required<std::string>(r2, "reasoning"), task_from_json(r2.at("task"))};
    for (const auto& t : r2.at("steps")) p.plan.steps.push_back(task_from_json(t));
    p.plan.predicted_state_changes = required<std::vector<std::string>>(r2, "predicted_state_changes");
    p.plan.risks = required<std::vector<std::string>>(r2, "risks");
    p.plan.unparsed_steps = required<std::vector<std::string>>(r2, "unparsed_steps");
    d.response2 = std::move(p);
  }
  return d;
}

}  // namespace craftagent
