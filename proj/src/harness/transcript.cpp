#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "craftagent/harness/harness.hpp"
#include "craftagent/util/hash.hpp"

namespace craftagent {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

json outcome_json(const TaskOutcome& o) {
  return {{"success", o.success}, {"reason", to_string(o.reason)}, {"steps_used", o.steps_used}};
}

TaskOutcome outcome_from_json(const json& j) {
  TaskOutcome o;
  o.success = j.at("success").get<bool>();
  const auto r = outcome_reason_from_string(j.at("reason").get<std::string>());
  if (!r) throw std::invalid_argument("bad outcome reason");
  o.reason = *r;
  o.steps_used = j.at("steps_used").get<int>();
  return o;
}

json vision_json(const VisionOutput& v) {
  if (const auto* d = std::get_if<FreeDescription>(&v)) {
    return {{"kind", "free_description"}, {"text", d->text}, {"encoding_failed", d->encoding_failed}};
  }
  const auto& e = std::get<ElementReport>(v);
  json blocks = nullptr;
  if (e.nearby_blocks) {
    blocks = json::array();
    for (const auto& b : *e.nearby_blocks) blocks.push_back({to_string(b.kind), b.dx, b.dy});
  }
  json entities = nullptr;
  if (e.nearby_entities) {
    entities = json::array();
    for (const auto& b : *e.nearby_entities) entities.push_back({b.kind, b.dx, b.dy});
  }
  return {{"kind", "elements"}, {"biome", opt(e.biome)},          {"time", opt(e.time)},
          {"nearby_blocks", blocks}, {"nearby_entities", entities}};
}

VisionOutput vision_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "free_description") {
    return FreeDescription{j.at("text").get<std::string>(), j.at("encoding_failed").get<bool>()};
  }
  if (kind != "elements") throw std::invalid_argument("bad vision kind '" + kind + "'");
  ElementReport e;
  e.biome = opt_string(j, "biome");
  e.time = opt_string(j, "time");
  if (!j.at("nearby_blocks").is_null()) {
    e.nearby_blocks.emplace();
    for (const auto& b : j["nearby_blocks"]) {
      const auto k = block_kind_from_string(b.at(0).get<std::string>());
      if (!k) throw std::invalid_argument("bad block kind in vision record");
      e.nearby_blocks->push_back({*k, b.at(1).get<int>(), b.at(2).get<int>()});
    }
  }
  if (!j.at("nearby_entities").is_null()) {
    e.nearby_entities.emplace();
    for (const auto& b : j["nearby_entities"]) {
      e.nearby_entities->push_back({b.at(0).get<std::string>(), b.at(1).get<int>(), b.at(2).get<int>()});
    }
  }
  return e;
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json IterationRecord::to_json() const {
  json ex = json::array();
  for (const auto& e : exchanges) ex.push_back(e.to_json());
  return {{"type", "iteration"},
          {"iteration", iteration},
          {"prompt_hash", prompt_hash},
          {"dual", dual ? craftagent::to_json(*dual) : json(nullptr)},
          {"parse_error", opt(parse_error)},
          {"response2_error", opt(response2_error)},
          {"adopted", adopted ? craftagent::to_json(*adopted) : json(nullptr)},
          {"adopted_text", adopted ? json(render_task(*adopted)) : json(nullptr)},
          {"outcome", outcome ? outcome_json(*outcome) : json(nullptr)},
          {"failure", opt(failure)},
          {"vision", vision ? vision_json(*vision) : json(nullptr)},
          {"milestones_hit", milestones_hit},
          {"exchanges", std::move(ex)}};
}

IterationRecord IterationRecord::from_json(const json& j) {
  IterationRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.prompt_hash = j.at("prompt_hash").get<std::string>();
  if (!j.at("dual").is_null()) r.dual = dual_from_json(j["dual"]);
  r.parse_error = opt_string(j, "parse_error");
  r.response2_error = opt_string(j, "response2_error");
  if (!j.at("adopted").is_null()) r.adopted = task_from_json(j["adopted"]);
  if (!j.at("outcome").is_null()) r.outcome = outcome_from_json(j["outcome"]);
  r.failure = opt_string(j, "failure");
  if (!j.at("vision").is_null()) r.vision = vision_from_json(j["vision"]);
  r.milestones_hit = j.at("milestones_hit").get<std::vector<std::string>>();
  for (const auto& e : j.at("exchanges")) r.exchanges.push_back(Exchange::from_json(e));
  return r;
}

std::string write_transcript(const TrialRecord& record) {
  std::string out;
  const json header = {{"type", "header"},
                       {"schema_version", kTranscriptSchemaVersion},
                       {"config", record.config.to_json()},
                       {"backend",
                        {{"name", record.backend.name},
                         {"model", record.backend.model},
                         {"deterministic", record.backend.deterministic}}},
                       {"rules_fingerprint", record.rules_fingerprint},
                       {"prompt_version", record.prompt_version},
                       {"fixture_start", record.fixture_start},
                       {"wall_clock", now_utc()}};
  out += header.dump() + "\n";
  for (const auto& it : record.iterations) out += it.to_json().dump() + "\n";
  json hits = json::object();
  for (const auto& [m, v] : record.milestone_first_hit) hits[m] = opt(v);
  const json summary = {{"type", "summary"},
                        {"iterations", record.iterations.size()},
                        {"reached_goal", record.reached_goal},
                        {"aborted", record.aborted},
                        {"abort_reason", record.abort_reason},
                        {"milestone_first_hit", std::move(hits)},
                        {"wall_clock", now_utc()}};
  out += summary.dump() + "\n";
  return out;
}

TrialRecord read_transcript(std::string_view jsonl) {
  TrialRecord r;
  bool header = false;
  bool summary = false;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (!header && type != "header") throw std::invalid_argument("transcript must start with a header");
      if (summary) throw std::invalid_argument("content after the summary line");
      if (type == "header") {
        if (header) throw std::invalid_argument("second header line");
        header = true;
        if (j.at("schema_version").get<int>() != kTranscriptSchemaVersion) {
          throw std::invalid_argument("unsupported transcript schema_version " +
                                      j["schema_version"].dump());
        }
        r.config = TrialConfig::from_json(j.at("config"));
        const json& b = j.at("backend");
        r.backend = {b.at("name").get<std::string>(), b.at("model").get<std::string>(),
                     b.at("deterministic").get<bool>()};
        r.rules_fingerprint = j.at("rules_fingerprint").get<std::string>();
        r.prompt_version = j.at("prompt_version").get<std::string>();
        r.fixture_start = j.at("fixture_start").get<bool>();
      } else if (type == "iteration") {
        r.iterations.push_back(IterationRecord::from_json(j));
        if (r.iterations.back().iteration != static_cast<int>(r.iterations.size())) {
          throw std::invalid_argument("iterations out of sequence");
        }
      } else if (type == "summary") {
        summary = true;
        if (j.at("iterations").get<std::size_t>() != r.iterations.size()) {
          throw std::invalid_argument("summary iteration count does not match");
        }
        r.reached_goal = j.at("reached_goal").get<bool>();
        r.aborted = j.at("aborted").get<bool>();
        r.abort_reason = j.at("abort_reason").get<std::string>();
        for (const auto& [m, v] : j.at("milestone_first_hit").items()) {
          r.milestone_first_hit[m] = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
        }
      } else {
        throw std::invalid_argument("unknown line type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("transcript line " + std::to_string(lineno) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw std::invalid_argument("transcript line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!header || !summary) throw std::invalid_argument("transcript is missing its header or summary");
  if (static_cast<int>(r.iterations.size()) > r.config.max_iterations) {
    throw std::invalid_argument("transcript has more iterations than its cap");
  }
  return r;
}

std::string transcript_canonical(std::string_view jsonl) {
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    j.erase("wall_clock");
    out += j.dump() + "\n";
  }
  return out;
}

std::string transcript_hash(std::string_view jsonl) { return sha256_hex(transcript_canonical(jsonl)); }

std::string transcript_filename(const TrialRecord& record) {
  return std::string(record.fixture_start ? "fixture_" : "") + "arm-" + record.config.arm.id +
         "_seed-" + std::to_string(record.config.seed) + "_trial-" +
         std::to_string(record.config.trial_index) + ".jsonl";
}

std::filesystem::path save_transcript(const TrialRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / transcript_filename(record);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << write_transcript(record);
  if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
  return path;
}

std::vector<TrialRecord> load_transcripts(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("no such directory " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TrialRecord> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    try {
      out.push_back(read_transcript(text));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace craftagent
