#include <regex>

#include "craftagent/curriculum/curriculum.hpp"

namespace craftagent {

namespace {

enum class Label { none, reasoning, task, steps, predicted_state, risks };

struct Line {
  Label label = Label::none;
  std::string rest;  // text after the label, or the whole line
};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

const std::regex& response_re() {
  static const std::regex re(R"(^\s*[*_#]*\s*response\s*([12])\s*[*_]*\s*:\s*[*_]*\s*(.*)$)",
                             std::regex::icase);
  return re;
}

Line classify(const std::string& raw) {
  static const std::regex label_re(
      R"(^\s*[*_#]*\s*(reasoning|task|steps|predicted\s+state|risks)\s*[*_]*\s*:\s*[*_]*\s*(.*)$)",
      std::regex::icase);
  std::smatch m;
  if (!std::regex_match(raw, m, label_re)) return {Label::none, raw};
  std::string name = m[1].str();
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  Label l = Label::predicted_state;
  if (name == "reasoning") l = Label::reasoning;
  if (name == "task") l = Label::task;
  if (name == "steps") l = Label::steps;
  if (name == "risks") l = Label::risks;
  return {l, m[2].str()};
}

struct Section {
  std::optional<std::string> reasoning;
  std::optional<std::string> task;
  std::vector<std::string> steps, predicted, risks;
};

// Numbered items ("1. x", "2) y"); other non-empty lines count as items only
// when no numbered line was seen.
void push_item(std::vector<std::string>& items, const std::string& line) {
  static const std::regex numbered(R"(^\s*\d+\s*[.)]\s*(.*)$)");
  std::smatch m;
  if (std::regex_match(line, m, numbered)) {
    items.push_back(trim(m[1].str()));
  } else if (const std::string t = trim(line); !t.empty() && t != "-") {
    items.push_back(t.front() == '-' ? trim(t.substr(1)) : t);
  }
}

Section read_section(const std::vector<std::string>& lines) {
  Section s;
  Label current = Label::none;
  for (const auto& raw : lines) {
    const Line line = classify(raw);
    if (line.label != Label::none) {
      current = line.label;
      switch (current) {
        case Label::reasoning:
          if (!s.reasoning) s.reasoning = trim(line.rest);
          break;
        case Label::task:
          if (!s.task) s.task = trim(line.rest);
          break;
        case Label::steps:
          push_item(s.steps, line.rest);
          break;
        case Label::predicted_state:
          push_item(s.predicted, line.rest);
          break;
        case Label::risks:
          push_item(s.risks, line.rest);
          break;
        case Label::none:
          break;
      }
      continue;
    }
    switch (current) {
      case Label::reasoning:
        if (const std::string t = trim(raw); !t.empty()) {
          *s.reasoning += s.reasoning->empty() ? t : "\n" + t;
        }
        break;
      case Label::task:
        if (s.task && s.task->empty()) s.task = trim(raw);
        break;
      case Label::steps:
        push_item(s.steps, raw);
        break;
      case Label::predicted_state:
        push_item(s.predicted, raw);
        break;
      case Label::risks:
        push_item(s.risks, raw);
        break;
      case Label::none:
        break;
    }
  }
  return s;
}

TaskProposal proposal_of(const Section& s, const Rules& rules) {
  if (!s.task || s.task->empty()) throw ParseError(ParseErrorKind::missing_task, "no Task: line");
  return {s.reasoning.value_or(""), parse_task(*s.task, rules)};
}

PredictiveProposal predictive_of(const Section& s, const Rules& rules) {
  PredictiveProposal out;
  out.proposal = proposal_of(s, rules);
  for (const auto& step : s.steps) {
    try {
      out.plan.steps.push_back(parse_task(step, rules));
    } catch (const ParseError&) {
      out.plan.unparsed_steps.push_back(step);
    }
  }
  out.plan.predicted_state_changes = s.predicted;
  out.plan.risks = s.risks;
  return out;
}

}  // namespace

std::string render_response(const TaskProposal& proposal) {
  return "Reasoning: " + proposal.reasoning + "\nTask: " + render_task(proposal.task);
}

std::string render_dual(const TaskProposal& response1, const PredictiveProposal& response2) {
  const auto numbered = [](const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += std::to_string(i + 1) + ". " + items[i] + "\n";
    }
    return out;
  };
  std::vector<std::string> steps;
  for (const Task& t : response2.plan.steps) steps.push_back(render_task(t));
  std::string out = "Response1:\n" + render_response(response1) + "\n\nResponse2:\n";
  out += "Reasoning: " + response2.proposal.reasoning + "\n";
  out += "Steps:\n" + numbered(steps);
  out += "Predicted State:\n" + numbered(response2.plan.predicted_state_changes);
  out += "Risks:\n" + numbered(response2.plan.risks);
  out += "Task: " + render_task(response2.proposal.task);
  return out;
}

DualProposal parse_planner_output(std::string_view text, PromptMode mode, const Rules& rules) {
  std::vector<std::string> r1, r2;
  bool saw_r2 = false;
  std::vector<std::string>* into = &r1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = nl + 1;
    std::smatch m;
    if (std::regex_match(line, m, response_re())) {
      if (m[1].str() == "2") {
        saw_r2 = true;
        into = &r2;
      } else {
        into = &r1;
      }
      const std::string rest = m[2].str();
      if (!trim(rest).empty()) into->push_back(rest);
      continue;
    }
    into->push_back(line);
  }

  DualProposal out;
  out.response1 = proposal_of(read_section(r1), rules);
  if (!saw_r2) {
    if (mode == PromptMode::predictive) {
      throw ParseError(ParseErrorKind::missing_response2, "no Response2 section");
    }
    return out;
  }
  if (mode == PromptMode::predictive) {
    out.response2 = predictive_of(read_section(r2), rules);
  } else {
    try {
      out.response2 = predictive_of(read_section(r2), rules);
    } catch (const ParseError&) {
      out.response2.reset();
    }
  }
  return out;
}

const TaskProposal& adopt(const DualProposal& dual, PromptMode mode) {
  if (mode == PromptMode::conventional) return dual.response1;
  if (!dual.response2) throw ParseError(ParseErrorKind::missing_response2, "cannot adopt Response2");
  return dual.response2->proposal;
}

std::string_view verb_class(Verb verb) {
  switch (verb) {
    case Verb::obtain:
    case Verb::mine:
      return "acquire";
    default:
      return to_string(verb);
  }
}

bool task_match(const Task& a, const Task& b) {
  return verb_class(a.verb) == verb_class(b.verb) && item_class(a.item) == item_class(b.item);
}

MatchStats match_rate(const std::vector<DualProposal>& duals) {
  MatchStats m;
  for (const auto& d : duals) {
    if (!d.response2) {
      ++m.excluded;
      continue;
    }
    ++m.pairs_total;
    if (task_match(d.response1.task, d.response2->proposal.task)) ++m.pairs_matched;
  }
  if (m.pairs_total == 0) throw std::invalid_argument("match_rate: no dual carries a Response2");
  m.rate = static_cast<double>(m.pairs_matched) / m.pairs_total;
  return m;
}

const std::vector<std::string>& default_milestones() {
  static const std::vector<std::string> list = {"wooden_pickaxe", "stone_pickaxe", "furnace",
                                                "iron_pickaxe",   "gold_ingot",    "golden_pickaxe"};
  return list;
}

std::vector<std::string> milestone_check(const WorldState& state,
                                         const std::vector<std::string>& milestones,
                                         const std::set<std::string>& achieved) {
  std::vector<std::string> fresh;
  for (const auto& item : milestones) {
    if (achieved.contains(item)) continue;
    bool held = state.inventory.count(item) >= 1;
    for (Pos p : state.placed_stations) {
      held = held || to_string(state.at(p)) == item;
    }
    if (held) fresh.push_back(item);
  }
  return fresh;
}

MilestoneTracker::MilestoneTracker(std::vector<std::string> milestones)
    : milestones_(std::move(milestones)) {}

std::vector<std::string> MilestoneTracker::update(const WorldState& state, int iteration) {
  auto fresh = milestone_check(state, milestones_, achieved_);
  for (const auto& m : fresh) {
    achieved_.insert(m);
    first_hits_[m] = iteration;
  }
  return fresh;
}

}  // namespace craftagent
