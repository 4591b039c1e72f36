#include "craftagent/perception/perception.hpp"
#include "craftagent/planner/backend.hpp"
#include "craftagent/prompt_assets.hpp"

namespace craftagent {

std::string vision_prompt(std::string_view goal_item) {
  std::string prompt(assets::kVisionFreeDescription);
  if (goal_item == "golden_pickaxe") return prompt;
  constexpr std::string_view kStock = "a gold pickaxe";
  std::string goal(goal_item);
  for (char& c : goal) {
    if (c == '_') c = ' ';
  }
  const bool vowel = !goal.empty() && std::string_view("aeiou").find(goal.front()) != std::string_view::npos;
  const auto at = prompt.find(kStock);
  if (at != std::string::npos) prompt.replace(at, kStock.size(), (vowel ? "an " : "a ") + goal);
  return prompt;
}

FreeDescription encode_free(const VisualFrame& frame, std::string_view goal_item,
                            PlannerBackend& backend, std::size_t cap) {
  PromptBundle bundle;
  bundle.purpose = PromptPurpose::vision_description;
  bundle.user_text = vision_prompt(goal_item);
  bundle.attachment = frame;
  FreeDescription out;
  try {
    out.text = backend.propose(bundle);
  } catch (const TransportError&) {
    out.encoding_failed = true;
    return out;
  }
  if (out.text.size() > cap) {
    std::size_t n = cap;
    // back off continuation bytes so a multi-byte character is not split
    while (n > 0 && (static_cast<unsigned char>(out.text[n]) & 0xC0) == 0x80) --n;
    out.text.resize(n);
  }
  return out;
}

}  // namespace craftagent
