#include "craftagent/harness/harness.hpp"
#include "loop.hpp"

namespace craftagent {

using nlohmann::json;

namespace {

template <class T, class F>
void diff(std::vector<Divergence>& out, int iteration, const char* field, const T& a, const T& b,
          F&& show) {
  if (a == b) return;
  out.push_back({iteration, field, show(a), show(b)});
}

std::string dump(const json& j) { return j.dump(); }

}  // namespace

std::vector<Divergence> compare_records(const TrialRecord& rec, const TrialRecord& rep) {
  std::vector<Divergence> out;
  const std::size_t n = std::min(rec.iterations.size(), rep.iterations.size());
  const auto as_json = [](const IterationRecord& it, const char* key) { return it.to_json()[key]; };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = rec.iterations[i];
    const auto& b = rep.iterations[i];
    const int k = static_cast<int>(i) + 1;
    for (const char* key : {"prompt_hash", "vision", "dual", "parse_error", "response2_error", "adopted",
                            "outcome", "failure", "milestones_hit"}) {
      diff(out, k, key, as_json(a, key), as_json(b, key), dump);
    }
  }
  const auto num = [](std::size_t v) { return std::to_string(v); };
  diff(out, 0, "iterations", rec.iterations.size(), rep.iterations.size(), num);
  const auto flag = [](bool v) { return std::string(v ? "true" : "false"); };
  diff(out, 0, "reached_goal", rec.reached_goal, rep.reached_goal, flag);
  diff(out, 0, "aborted", rec.aborted, rep.aborted, flag);
  for (const auto& [m, v] : rec.milestone_first_hit) {
    auto it = rep.milestone_first_hit.find(m);
    const std::optional<int> w = it == rep.milestone_first_hit.end() ? std::nullopt : it->second;
    const auto show = [](const std::optional<int>& x) { return x ? std::to_string(*x) : std::string("censored"); };
    if (v != w) out.push_back({0, "milestone " + m, show(v), show(w)});
  }
  // Iteration-level entries first, in order; trial-level ones last.
  std::stable_partition(out.begin(), out.end(), [](const Divergence& d) { return d.iteration > 0; });
  return out;
}

std::optional<int> ReplayReport::first_divergent_iteration() const {
  std::optional<int> best;
  for (const auto& d : divergences) {
    if (d.iteration > 0 && (!best || d.iteration < *best)) best = d.iteration;
  }
  return best;
}

ReplayReport replay(const TrialRecord& recorded, bool strict, const Rules& rules,
                    const PromptTemplates& templates) {
  if (recorded.fixture_start) {
    throw std::invalid_argument("transcript starts from a fixture state, which is not stored");
  }
  ReplayReport report;
  if (recorded.rules_fingerprint != rules.fingerprint()) {
    report.diagnostics.push_back("rules fingerprint differs: recorded " +
                                 recorded.rules_fingerprint.substr(0, 12) + ", replaying with " +
                                 rules.fingerprint().substr(0, 12) +
                                 "; outcome differences below may come from the recipe tables");
  }
  if (recorded.prompt_version != templates.version) {
    report.diagnostics.push_back("prompt template version differs: recorded " + recorded.prompt_version +
                                 ", replaying with " + templates.version);
  }

  std::vector<Exchange> exchanges;
  for (const auto& it : recorded.iterations) {
    exchanges.insert(exchanges.end(), it.exchanges.begin(), it.exchanges.end());
  }
  PlaybackBackend playback(exchanges, strict);
  try {
    run_loop(generate_world(recorded.config.seed, recorded.config.world), recorded.config, playback,
             rules, templates, report.replayed);
  } catch (const PlaybackError& e) {
    const int at = static_cast<int>(report.replayed.iterations.size());
    if (e.kind() == PlaybackError::Kind::hash_mismatch) report.strict_abort = true;
    report.diagnostics.push_back("iteration " + std::to_string(at) + ": " + e.what());
    report.divergences.push_back({at, "exchanges", "end of recorded calls",
                                  e.kind() == PlaybackError::Kind::exhausted ? "another call" : "prompt hash"});
  }
  report.hash_mismatches = playback.mismatches();
  if (playback.cursor() < exchanges.size() && !report.strict_abort) {
    report.diagnostics.push_back(std::to_string(exchanges.size() - playback.cursor()) +
                                 " recorded calls were never replayed");
  }
  auto diffs = compare_records(recorded, report.replayed);
  if (report.strict_abort) {
    // The aborted iteration is incomplete; only earlier ones are comparable.
    const int upto = static_cast<int>(report.replayed.iterations.size());
    std::erase_if(diffs, [&](const Divergence& d) { return d.iteration == 0 || d.iteration >= upto; });
  }
  report.divergences.insert(report.divergences.end(), diffs.begin(), diffs.end());
  std::stable_sort(report.divergences.begin(), report.divergences.end(), [](const auto& a, const auto& b) {
    if ((a.iteration == 0) != (b.iteration == 0)) return b.iteration == 0;
    return a.iteration < b.iteration;
  });
  return report;
}

}  // namespace craftagent
