#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "craftagent/perception/perception.hpp"
#include "craftagent/planner/backend.hpp"

namespace craftagent {

// ---- task text ------------------------------------------------------------

// "Smelt 3 raw gold.", "Obtain a wood log.", "Place the furnace."
std::string render_task(const Task& task);

enum class ParseErrorKind : std::uint8_t {
  missing_task,
  unknown_verb,
  unknown_item,
  bad_quantity,
  missing_response2,
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Canonicalizes one task phrase against the closed vocabulary. Throws
// ParseError.
Task parse_task(std::string_view text, const Rules& rules = Rules::defaults());

// ---- planner output -------------------------------------------------------

struct TaskProposal {
  std::string reasoning;
  Task task;

  friend bool operator==(const TaskProposal&, const TaskProposal&) = default;
};

struct PredictionPlan {
  std::vector<Task> steps;
  std::vector<std::string> predicted_state_changes;
  std::vector<std::string> risks;
  std::vector<std::string> unparsed_steps;  // numbered lines outside the grammar

  friend bool operator==(const PredictionPlan&, const PredictionPlan&) = default;
};

struct PredictiveProposal {
  TaskProposal proposal;
  PredictionPlan plan;

  friend bool operator==(const PredictiveProposal&, const PredictiveProposal&) = default;
};

struct DualProposal {
  TaskProposal response1;
  std::optional<PredictiveProposal> response2;

  friend bool operator==(const DualProposal&, const DualProposal&) = default;
};

// "Reasoning: ...\nTask: ..."
std::string render_response(const TaskProposal& proposal);
// Response1 and Response2 sections in the documented layout.
std::string render_dual(const TaskProposal& response1, const PredictiveProposal& response2);

// Throws ParseError. In conventional mode a malformed Response2 is dropped;
// in predictive mode it is an error.
DualProposal parse_planner_output(std::string_view text, PromptMode mode,
                                  const Rules& rules = Rules::defaults());

// Throws ParseError(missing_response2) for a predictive adopt without one.
const TaskProposal& adopt(const DualProposal& dual, PromptMode mode);

// ---- matching -------------------------------------------------------------

// obtain and mine share the "acquire" class.
std::string_view verb_class(Verb verb);
bool task_match(const Task& a, const Task& b);

struct MatchStats {
  int pairs_total = 0;
  int pairs_matched = 0;
  double rate = 0.0;
  int excluded = 0;  // duals without a parsed Response2

  friend bool operator==(const MatchStats&, const MatchStats&) = default;
};

// Throws std::invalid_argument when no dual carries a Response2.
MatchStats match_rate(const std::vector<DualProposal>& duals);

// ---- milestones -----------------------------------------------------------

const std::vector<std::string>& default_milestones();

// Milestones whose item is now held and that are not yet in `achieved`,
// in list order.
std::vector<std::string> milestone_check(const WorldState& state,
                                         const std::vector<std::string>& milestones,
                                         const std::set<std::string>& achieved);

class MilestoneTracker {
 public:
  explicit MilestoneTracker(std::vector<std::string> milestones = default_milestones());

  // Records first hits at `iteration` and returns the new ones.
  std::vector<std::string> update(const WorldState& state, int iteration);

  const std::vector<std::string>& milestones() const { return milestones_; }
  const std::map<std::string, int>& first_hits() const { return first_hits_; }

 private:
  std::vector<std::string> milestones_;
  std::set<std::string> achieved_;
  std::map<std::string, int> first_hits_;
};

// ---- prompts --------------------------------------------------------------

enum class VisionMode : std::uint8_t { none, direct, free_description, element_extraction };

std::string_view to_string(VisionMode mode);
std::optional<VisionMode> vision_mode_from_string(std::string_view s);

struct LastOutcome {
  std::string task;  // rendered task text
  bool success = false;
  std::string reason;

  friend bool operator==(const LastOutcome&, const LastOutcome&) = default;
};

// Completed and failed task lists, each without duplicates. A task that
// later succeeds leaves the failed list.
class TaskHistory {
 public:
  void record(const std::string& task, const TaskOutcome& outcome);
  void record_unparsed();

  const std::vector<std::string>& completed() const { return completed_; }
  const std::vector<std::string>& failed() const { return failed_; }
  const std::optional<LastOutcome>& last() const { return last_; }

 private:
  std::vector<std::string> completed_;
  std::vector<std::string> failed_;
  std::optional<LastOutcome> last_;
};

using VisionInput = std::variant<std::monostate, ElementReport, FreeDescription, VisualFrame>;

struct PromptTemplates {
  std::string system;
  std::string response2_block;
  std::string version;

  static PromptTemplates stock();
  friend bool operator==(const PromptTemplates&, const PromptTemplates&) = default;
};

std::string render_observation(const Observation& obs);

// Throws std::invalid_argument on an empty goal.
PromptBundle build_prompt(const Observation& obs, const VisionInput& vision,
                          const TaskHistory& history, std::string_view goal, PromptMode mode,
                          const PromptTemplates& templates = PromptTemplates::stock());

// What a text-only reader can recover from a curriculum prompt. Used by the
// oracle planner, which sees exactly what a live model would.
struct PromptState {
  Inventory inventory;
  std::set<std::string> nearby_blocks;
  std::string equipment;
  std::string goal;
  std::vector<std::string> completed;
  std::vector<std::string> failed;
  std::optional<LastOutcome> last;
};

// Throws std::invalid_argument when the inventory or goal line is missing.
PromptState read_prompt_state(std::string_view user_text);

// ---- bundle plumbing ------------------------------------------------------

nlohmann::json to_json(const PromptBundle& bundle);
PromptBundle bundle_from_json(const nlohmann::json& j);
// sha256 over the canonical JSON form.
std::string bundle_hash(const PromptBundle& bundle);

nlohmann::json to_json(const Task& task);
Task task_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DualProposal& dual);
DualProposal dual_from_json(const nlohmann::json& j);

}  // namespace craftagent
