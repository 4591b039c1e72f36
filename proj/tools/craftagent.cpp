#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "craftagent/harness/harness.hpp"

using namespace craftagent;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kBackend = 2, kDivergence = 3 };

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Rules load_rules(const std::string& path) {
  if (path.empty()) return Rules::defaults();
  return Rules::from_json(read_json_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct RunFlags {
  RunSettings s;
  std::string config;
  std::string rules;
  bool quiet = false;
};

int cmd_run(RunFlags& f) {
  RunSettings& s = f.s;
  if (!f.config.empty()) s.apply_json(read_json_file(f.config));
  s.validate();
  const Rules rules = load_rules(f.rules);
  const BackendFactory factory = s.backend == "http" ? http_factory(s.http) : oracle_factory(rules);
  const auto records = run_experiment(s.plan(), factory, rules);
  const auto dir = s.out_dir / "transcripts";
  bool backend_failed = false;
  for (const auto& r : records) {
    const auto path = save_transcript(r, dir);
    if (r.aborted) backend_failed = true;
    if (!f.quiet) {
      std::cout << "arm " << r.config.arm.id << " seed " << r.config.seed << ": " << r.iterations.size()
                << " iterations, " << (r.reached_goal ? "goal reached" : "goal not reached")
                << (r.aborted ? ", aborted (" + r.abort_reason + ")" : std::string()) << " -> "
                << path.string() << "\n";
    }
  }
  return backend_failed ? kBackend : kOk;
}

int cmd_report(const std::string& in_dir, const std::string& format, const std::string& out_dir) {
  if (format != "csv" && format != "json" && format != "text" && format != "all") {
    throw ConfigError("unknown format '" + format + "'");
  }
  std::vector<TrialRecord> records;
  try {
    records = load_transcripts(in_dir);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (records.empty()) throw ConfigError("no transcripts under " + in_dir);
  const MilestoneTable table = aggregate(records);
  if (format == "text") {
    std::cout << report_text(table);
    return kOk;
  }
  for (const auto& p : export_report(table, format, out_dir.empty() ? in_dir : out_dir)) {
    std::cout << "wrote " << p.string() << "\n";
  }
  if (format == "all") std::cout << "\n" << report_text(table);
  return kOk;
}

int cmd_replay(const std::string& path, bool strict, const std::string& rules_path) {
  TrialRecord recorded;
  try {
    recorded = read_transcript(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ReplayReport rep;
  try {
    rep = replay(recorded, strict, load_rules(rules_path));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& d : rep.diagnostics) std::cout << "note: " << d << "\n";
  if (!rep.hash_mismatches.empty()) {
    std::cout << rep.hash_mismatches.size() << " prompt hash mismatch(es), first at call "
              << rep.hash_mismatches.front() + 1 << "\n";
  }
  if (rep.divergences.empty()) {
    std::cout << "replayed " << rep.replayed.iterations.size() << " iterations: no divergence\n";
  } else {
    if (auto first = rep.first_divergent_iteration()) {
      std::cout << "first divergence at iteration " << *first << "\n";
    }
    for (const auto& d : rep.divergences) {
      std::cout << "  " << (d.iteration > 0 ? "iteration " + std::to_string(d.iteration) : std::string("trial"))
                << " " << d.field << ": recorded " << d.recorded << ", replayed " << d.replayed << "\n";
    }
  }
  return strict && !rep.clean() ? kDivergence : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crafting-world agent harness"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "run trials and write JSONL transcripts");
  run->add_option("--arm", rf.s.arms, "arm id(s): 1-1 1-2 1-3 1-4 2-1 2-2")->expected(1, -1);
  run->add_option("--seed", rf.s.seed, "base seed; trial i uses seed + i");
  run->add_option("--trials", rf.s.trials, "trials per arm");
  run->add_option("--backend", rf.s.backend, "oracle or http");
  run->add_option("--cap", rf.s.cap, "iteration cap");
  run->add_option("--out-dir", rf.s.out_dir, "output directory");
  run->add_option("--goal", rf.s.goal, "goal item");
  run->add_option("--step-budget", rf.s.step_budget, "primitive steps per task");
  run->add_option("--parallelism", rf.s.parallelism, "concurrent trials");
  run->add_option("--config", rf.config, "JSON config file; its keys override flags");
  run->add_option("--rules", rf.rules, "JSON rules file replacing the stock tables");
  run->add_flag("--quiet", rf.quiet);

  std::string in_dir, format = "all", report_out;
  auto* report = app.add_subcommand("report", "aggregate transcripts into a milestone table");
  report->add_option("--in-dir", in_dir, "directory holding transcripts")->required();
  report->add_option("--format", format, "csv, json, text or all");
  report->add_option("--out", report_out, "where report files go (default: --in-dir)");

  std::string transcript, replay_rules;
  bool strict = false;
  auto* rp = app.add_subcommand("replay", "re-execute a transcript against its recorded responses");
  rp->add_option("--transcript", transcript, "transcript file")->required();
  rp->add_flag("--strict", strict, "exit 3 on any divergence or prompt hash mismatch");
  rp->add_option("--rules", replay_rules, "JSON rules file to replay under");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) return cmd_run(rf);
    if (*report) return cmd_report(in_dir, format, report_out);
    if (*rp) return cmd_replay(transcript, strict, replay_rules);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const TransportError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
