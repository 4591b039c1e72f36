#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "craftagent/craftworld/executor.hpp"
#include "craftagent/curriculum/curriculum.hpp"
#include "craftagent/planner/planner.hpp"

namespace craftagent {

inline constexpr int kTranscriptSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kDefaultCap = 70;

// ---- arms -----------------------------------------------------------------

// An experiment arm. `dual_prompt` asks for both responses; `adopt` picks
// which one is executed. Arm 2-1 is a dual prompt adopting Response1 so
// that its counterfactual Response2 is still logged.
struct Arm {
  std::string id;
  VisionMode vision = VisionMode::none;
  bool dual_prompt = false;
  PromptMode adopt = PromptMode::conventional;

  friend bool operator==(const Arm&, const Arm&) = default;
};

const std::vector<Arm>& standard_arms();
std::optional<Arm> arm_by_id(std::string_view id);

// ---- config ---------------------------------------------------------------

struct TrialConfig {
  Arm arm = *arm_by_id("2-2");
  std::uint64_t seed = 0;  // the trial's own seed, already derived
  int trial_index = 0;
  std::string backend = "oracle";  // oracle | http | playback
  int max_iterations = kDefaultCap;
  std::string goal = "golden_pickaxe";
  int step_budget = kDefaultStepBudget;
  int parse_retries = 1;
  WorldConfig world;
  PerceptionConfig perception;

  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
  static TrialConfig from_json(const nlohmann::json& j);  // throws ConfigError
};

// ---- records --------------------------------------------------------------

struct IterationRecord {
  int iteration = 0;
  std::string prompt_hash;
  std::optional<DualProposal> dual;
  std::optional<std::string> parse_error;      // typed marker "kind: detail"
  std::optional<std::string> response2_error;  // dual prompt, Response1 usable
  std::optional<Task> adopted;
  std::optional<TaskOutcome> outcome;
  std::optional<std::string> failure;  // backend failure, "<kind>: <message>"
  std::optional<VisionOutput> vision;
  std::vector<std::string> milestones_hit;
  std::vector<Exchange> exchanges;

  nlohmann::json to_json() const;
  static IterationRecord from_json(const nlohmann::json& j);
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct TrialRecord {
  TrialConfig config;
  BackendDescriptor backend;
  std::string rules_fingerprint;
  std::string prompt_version;
  bool fixture_start = false;
  std::vector<IterationRecord> iterations;
  // nullopt marks a milestone censored at the cap.
  std::map<std::string, std::optional<int>> milestone_first_hit;
  bool reached_goal = false;
  bool aborted = false;
  std::string abort_reason;

  std::vector<DualProposal> duals() const;
};

// The observation -> prompt -> propose -> execute loop. Backend failures
// abort the trial and leave a partial record; nothing is thrown for them.
TrialRecord run_trial(const TrialConfig& config, PlannerBackend& backend,
                      const Rules& rules = Rules::defaults(),
                      const PromptTemplates& templates = PromptTemplates::stock());

// Same loop from a prepared start state instead of a generated world.
TrialRecord run_trial_from(WorldState start, const TrialConfig& config, PlannerBackend& backend,
                           const Rules& rules = Rules::defaults(),
                           const PromptTemplates& templates = PromptTemplates::stock());

// Prerequisite pairs (earlier, later) of the default milestone list: the
// later item cannot be made before the earlier one is held.
const std::vector<std::pair<std::string, std::string>>& milestone_chain();

// "a@i > b@j" strings for every chain pair hit out of order, including a
// later milestone hit while its prerequisite stayed censored.
std::vector<std::string> monotonicity_violations(const TrialRecord& record);

// ---- experiments ----------------------------------------------------------

using BackendFactory = std::function<std::unique_ptr<PlannerBackend>(const TrialConfig&)>;

BackendFactory oracle_factory(const Rules& rules = Rules::defaults());
// One shared HttpBackend for every trial (its semaphore bounds in-flight
// calls). Throws ConfigError.
BackendFactory http_factory(const HttpConfig& config);

struct ExperimentPlan {
  std::vector<TrialConfig> arms;  // seed holds the base seed
  int trials = 3;
  int parallelism = 1;
};

// Trial i of each arm runs with seed base + i. Records come back in arm
// order, then trial order, whatever the parallelism.
std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, const BackendFactory& factory,
                                        const Rules& rules = Rules::defaults());

// ---- transcripts ----------------------------------------------------------

// Header, one line per iteration, summary. Wall-clock fields are named
// "wall_clock" and are ignored by transcript_canonical.
std::string write_transcript(const TrialRecord& record);
TrialRecord read_transcript(std::string_view jsonl);  // throws std::invalid_argument
std::string transcript_canonical(std::string_view jsonl);
std::string transcript_hash(std::string_view jsonl);

std::string transcript_filename(const TrialRecord& record);
std::filesystem::path save_transcript(const TrialRecord& record, const std::filesystem::path& dir);
std::vector<TrialRecord> load_transcripts(const std::filesystem::path& dir);

// ---- aggregation ----------------------------------------------------------

struct MilestoneCell {
  std::string milestone;
  std::optional<double> mean;  // over achieved trials, rounded to 2 decimals
  int achieved = 0;
  int total = 0;

  friend bool operator==(const MilestoneCell&, const MilestoneCell&) = default;
};

struct ArmSummary {
  std::string arm;
  int trials = 0;
  int aborted = 0;
  std::vector<MilestoneCell> cells;
  std::optional<MatchStats> match;
  std::optional<ExtractionStats> extraction;

  friend bool operator==(const ArmSummary&, const ArmSummary&) = default;
};

struct MilestoneTable {
  std::vector<ArmSummary> arms;

  friend bool operator==(const MilestoneTable&, const MilestoneTable&) = default;
};

// Arms in standard order, then unknown ids sorted. Throws std::invalid_argument
// on an empty record set.
MilestoneTable aggregate(const std::vector<TrialRecord>& records);
ArmSummary aggregate_arm(const std::string& arm, const std::vector<TrialRecord>& records);

std::string format_mean(const std::optional<double>& mean);  // "20.00" or "—"

std::string report_csv(const MilestoneTable& table);
MilestoneTable report_from_csv(std::string_view csv);  // throws std::invalid_argument
nlohmann::json report_json(const MilestoneTable& table);
std::string report_text(const MilestoneTable& table);

// Writes report.csv and/or report.json under `dir`; format is csv, json or
// all. Throws std::runtime_error on I/O failure, ConfigError on a bad format.
std::vector<std::filesystem::path> export_report(const MilestoneTable& table,
                                                 const std::string& format,
                                                 const std::filesystem::path& dir);

// ---- replay ---------------------------------------------------------------

struct Divergence {
  int iteration = 0;  // 0 for trial-level differences
  std::string field;
  std::string recorded;
  std::string replayed;
};

struct ReplayReport {
  TrialRecord replayed;
  std::vector<Divergence> divergences;
  std::vector<std::string> diagnostics;
  std::vector<std::size_t> hash_mismatches;  // exchange positions
  bool strict_abort = false;

  bool clean() const { return divergences.empty() && hash_mismatches.empty() && !strict_abort; }
  std::optional<int> first_divergent_iteration() const;
};

// Re-runs the recorded trial against its own exchanges. With `strict` a
// prompt-hash mismatch stops the replay at that call.
ReplayReport replay(const TrialRecord& recorded, bool strict, const Rules& rules = Rules::defaults(),
                    const PromptTemplates& templates = PromptTemplates::stock());

std::vector<Divergence> compare_records(const TrialRecord& recorded, const TrialRecord& replayed);

// ---- run configuration ----------------------------------------------------

// Everything the `run` subcommand needs. Defaults < flags < config file.
struct RunSettings {
  std::vector<std::string> arms{"2-2"};
  std::uint64_t seed = 0;
  int trials = 3;
  std::string backend = "oracle";
  int cap = kDefaultCap;
  std::filesystem::path out_dir = "runs";
  std::string goal = "golden_pickaxe";
  int step_budget = kDefaultStepBudget;
  int parse_retries = 1;
  int parallelism = 1;
  WorldConfig world;
  HttpConfig http;

  // Applies every key of a config-file object; throws ConfigError.
  void apply_json(const nlohmann::json& j);
  void validate() const;
  ExperimentPlan plan() const;
};

}  // namespace craftagent
