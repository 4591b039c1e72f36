#include <regex>
#include <sstream>

#include "craftagent/curriculum/curriculum.hpp"
#include "craftagent/prompt_assets.hpp"

namespace craftagent {

std::string_view to_string(VisionMode mode) {
  switch (mode) {
    case VisionMode::none:
      return "none";
    case VisionMode::direct:
      return "direct";
    case VisionMode::free_description:
      return "free_description";
    case VisionMode::element_extraction:
      return "element_extraction";
  }
  return "none";
}

std::optional<VisionMode> vision_mode_from_string(std::string_view s) {
  for (VisionMode m : {VisionMode::none, VisionMode::direct, VisionMode::free_description,
                       VisionMode::element_extraction}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void TaskHistory::record(const std::string& task, const TaskOutcome& outcome) {
  last_ = LastOutcome{task, outcome.success, std::string(to_string(outcome.reason))};
  const auto has = [](const std::vector<std::string>& v, const std::string& t) {
    return std::find(v.begin(), v.end(), t) != v.end();
  };
  if (outcome.success) {
    std::erase(failed_, task);
    if (!has(completed_, task)) completed_.push_back(task);
  } else if (!has(failed_, task) && !has(completed_, task)) {
    failed_.push_back(task);
  }
}

void TaskHistory::record_unparsed() { last_ = LastOutcome{"(no task)", false, "parse_error"}; }

namespace {

std::string rstrip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string join(const std::vector<std::string>& items, std::string_view sep,
                 std::string_view empty) {
  if (items.empty()) return std::string(empty);
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += sep;
    out += i;
  }
  return out;
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  while (true) {
    const auto at = s.find(sep);
    out.emplace_back(s.substr(0, at));
    if (at == std::string_view::npos) break;
    s.remove_prefix(at + sep.size());
  }
  return out;
}

constexpr std::string_view kCompleted = "Completed tasks so far: ";
constexpr std::string_view kFailed = "Failed tasks that are too hard: ";
constexpr std::string_view kLast = "Last outcome: ";
constexpr std::string_view kGoal = "Final goal: ";
constexpr std::string_view kBlocks = "Nearby blocks: ";
constexpr std::string_view kEquipment = "Equipment: ";
constexpr std::string_view kTaskSep = "; ";
constexpr std::string_view kArrow = " -> ";

}  // namespace

PromptTemplates PromptTemplates::stock() {
  return {rstrip(assets::kCurriculumSystem), rstrip(assets::kResponse2Block),
          std::string(assets::kPromptVersion)};
}

std::string render_observation(const Observation& obs) {
  std::set<std::string> blocks;
  for (const auto& b : obs.nearby_blocks) blocks.insert(std::string(to_string(b.kind)));
  std::set<std::string> entities;
  for (const auto& e : obs.nearby_entities) entities.insert(e.kind);

  std::ostringstream out;
  out << "Biome: " << to_string(obs.biome) << "\n";
  out << "Time: " << to_string(obs.time_of_day) << "\n";
  out << kBlocks << join({blocks.begin(), blocks.end()}, ", ", "None") << "\n";
  out << "Nearby entities: " << join({entities.begin(), entities.end()}, ", ", "None") << "\n";
  out << "Health: " << obs.health << "/" << kMaxVital << "\n";
  out << "Hunger: " << obs.hunger << "/" << kMaxVital << "\n";
  out << "Position: x=" << obs.position.x << ", y=" << obs.position.y << "\n";
  out << kEquipment << (obs.equipment.empty() ? "none" : obs.equipment) << "\n";
  out << "Inventory (" << obs.inventory.slots_used() << "/" << kInventorySlots << "): ";
  if (obs.inventory.items().empty()) {
    out << "Empty";
  } else {
    out << "{";
    bool first = true;
    for (const auto& [item, n] : obs.inventory.items()) {
      out << (first ? "" : ", ") << "'" << item << "': " << n;
      first = false;
    }
    out << "}";
  }
  return out.str();
}

PromptBundle build_prompt(const Observation& obs, const VisionInput& vision,
                          const TaskHistory& history, std::string_view goal, PromptMode mode,
                          const PromptTemplates& templates) {
  if (goal.empty()) throw std::invalid_argument("build_prompt: empty goal");
  PromptBundle b;
  b.mode = mode;
  b.purpose = PromptPurpose::curriculum;
  b.system_text = templates.system;
  if (mode == PromptMode::predictive) b.system_text += "\n\n" + templates.response2_block;

  std::string u = render_observation(obs) + "\n";
  if (const auto* rep = std::get_if<ElementReport>(&vision)) {
    u += "\nVisual information (element extraction):\n" + render_elements(*rep) + "\n";
  } else if (const auto* free = std::get_if<FreeDescription>(&vision)) {
    u += "\nVisual information (free description):\n" + (free->is_na() ? "N/A" : free->text) + "\n";
  } else if (const auto* frame = std::get_if<VisualFrame>(&vision)) {
    u += "\nVisual information: the current view is attached.\n";
    b.attachment = *frame;
  }
  u += "\n";
  u += std::string(kCompleted) + join(history.completed(), kTaskSep, "None") + "\n";
  u += std::string(kFailed) + join(history.failed(), kTaskSep, "None") + "\n";
  u += std::string(kLast);
  if (const auto& last = history.last()) {
    u += last->task + std::string(kArrow) +
         (last->success ? std::string("completed") : "failed (" + last->reason + ")");
  } else {
    u += "None";
  }
  u += "\n" + std::string(kGoal) + std::string(goal);
  b.user_text = std::move(u);
  return b;
}

PromptState read_prompt_state(std::string_view user_text) {
  static const std::regex inv_re(R"(^Inventory \((\d+)/(\d+)\): (.*)$)");
  static const std::regex entry_re(R"('([^']+)':\s*(\d+))");
  PromptState st;
  bool saw_inventory = false;
  bool saw_blocks = false;
  bool saw_goal = false;
  const auto list = [](std::string_view rest) {
    return rest == "None" ? std::vector<std::string>{} : split(rest, kTaskSep);
  };
  for (const std::string& line : split(user_text, "\n")) {
    const std::string_view l = line;
    std::smatch m;
    if (!saw_inventory && std::regex_match(line, m, inv_re)) {
      saw_inventory = true;
      const std::string body = m[3].str();
      for (auto it = std::sregex_iterator(body.begin(), body.end(), entry_re);
           it != std::sregex_iterator(); ++it) {
        st.inventory.add((*it)[1].str(), std::stoi((*it)[2].str()));
      }
    } else if (!saw_blocks && l.starts_with(kBlocks)) {
      saw_blocks = true;
      const std::string_view rest = l.substr(kBlocks.size());
      if (rest != "None" && rest != "none" && rest != "N/A") {
        for (std::string name : split(rest, ", ")) {
          if (const auto x = name.find(" x"); x != std::string::npos) name.resize(x);
          st.nearby_blocks.insert(name);
        }
      }
    } else if (l.starts_with(kEquipment)) {
      const std::string_view rest = l.substr(kEquipment.size());
      st.equipment = rest == "none" ? "" : std::string(rest);
    } else if (l.starts_with(kCompleted)) {
      st.completed = list(l.substr(kCompleted.size()));
    } else if (l.starts_with(kFailed)) {
      st.failed = list(l.substr(kFailed.size()));
    } else if (l.starts_with(kLast)) {
      const std::string_view rest = l.substr(kLast.size());
      const auto arrow = rest.rfind(kArrow);
      if (rest != "None" && arrow != std::string_view::npos) {
        LastOutcome last;
        last.task = std::string(rest.substr(0, arrow));
        const std::string_view verdict = rest.substr(arrow + kArrow.size());
        last.success = verdict == "completed";
        last.reason = "completed";
        if (!last.success) {
          const auto open = verdict.find('(');
          const auto close = verdict.rfind(')');
          if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
            last.reason = std::string(verdict.substr(open + 1, close - open - 1));
          }
        }
        st.last = last;
      }
    } else if (l.starts_with(kGoal)) {
      saw_goal = true;
      st.goal = std::string(l.substr(kGoal.size()));
    }
  }
  if (!saw_inventory) throw std::invalid_argument("prompt has no inventory line");
  if (!saw_goal) throw std::invalid_argument("prompt has no goal line");
  return st;
}

}  // namespace craftagent
