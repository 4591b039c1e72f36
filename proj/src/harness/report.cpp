#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "craftagent/harness/harness.hpp"

namespace craftagent {

using nlohmann::json;

namespace {

constexpr const char* kCensorNote =
    "Means cover only the trials that reached the milestone within the iteration cap; "
    "trials that did not are left out rather than counted at the cap, and the achieved/total "
    "count beside each mean says how many there were.";

const char* kCsvHeader =
    "schema_version,arm,milestone,mean,achieved,total,trials,aborted,match_pairs,match_matched,"
    "match_excluded,match_rate,extraction,extraction_overall,extraction_rate";

std::string fixed(double v, int places) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << v;
  return os.str();
}

std::string fraction(const FieldCount& c) {
  return std::to_string(c.extracted) + "/" + std::to_string(c.total);
}

FieldCount parse_fraction(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw std::invalid_argument("bad fraction '" + s + "'");
  return {std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1))};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int arm_rank(const std::string& id) {
  const auto& arms = standard_arms();
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].id == id) return static_cast<int>(i);
  }
  return static_cast<int>(arms.size());
}

}  // namespace

std::string format_mean(const std::optional<double>& mean) {
  return mean ? fixed(*mean, 2) : std::string("—");
}

ArmSummary aggregate_arm(const std::string& arm, const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("arm " + arm + " has no records");
  ArmSummary s;
  s.arm = arm;
  s.trials = static_cast<int>(records.size());
  std::vector<std::string> milestones = default_milestones();
  for (const auto& r : records) {
    if (r.aborted) ++s.aborted;
    for (const auto& [m, v] : r.milestone_first_hit) {
      if (std::find(milestones.begin(), milestones.end(), m) == milestones.end()) milestones.push_back(m);
    }
  }
  for (const auto& m : milestones) {
    MilestoneCell c;
    c.milestone = m;
    c.total = s.trials;
    long sum = 0;
    for (const auto& r : records) {
      auto it = r.milestone_first_hit.find(m);
      if (it != r.milestone_first_hit.end() && it->second) {
        ++c.achieved;
        sum += *it->second;
      }
    }
    if (c.achieved > 0) c.mean = std::round(static_cast<double>(sum) / c.achieved * 100.0) / 100.0;
    s.cells.push_back(std::move(c));
  }

  std::vector<DualProposal> duals;
  std::vector<VisionOutput> vision;
  for (const auto& r : records) {
    for (const auto& it : r.iterations) {
      if (it.dual) duals.push_back(*it.dual);
      if (it.vision) vision.push_back(*it.vision);
    }
  }
  if (std::any_of(duals.begin(), duals.end(), [](const auto& d) { return d.response2.has_value(); })) {
    s.match = match_rate(duals);
  }
  if (!vision.empty()) s.extraction = extraction_stats(vision);
  return s;
}

MilestoneTable aggregate(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate needs at least one record");
  std::map<std::string, std::vector<TrialRecord>> by_arm;
  for (const auto& r : records) by_arm[r.config.arm.id].push_back(r);
  std::vector<std::string> ids;
  for (const auto& [id, rs] : by_arm) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(),
                   [](const auto& a, const auto& b) { return arm_rank(a) < arm_rank(b); });
  MilestoneTable t;
  for (const auto& id : ids) t.arms.push_back(aggregate_arm(id, by_arm[id]));
  return t;
}

std::string report_csv(const MilestoneTable& table) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& a : table.arms) {
    std::string match = ",,,";
    if (a.match) {
      match = std::to_string(a.match->pairs_total) + "," + std::to_string(a.match->pairs_matched) + "," +
              std::to_string(a.match->excluded) + "," + fixed(a.match->rate, 4);
    }
    std::string ext = ",,";
    if (a.extraction) {
      std::string fields;
      for (const auto& [name, c] : a.extraction->fields) {
        if (!fields.empty()) fields += ";";
        fields += name + "=" + fraction(c);
      }
      ext = fields + "," + fraction(a.extraction->overall) + "," + fixed(a.extraction->overall.rate(), 4);
    }
    for (const auto& c : a.cells) {
      out += std::to_string(kReportSchemaVersion) + "," + a.arm + "," + c.milestone + "," +
             format_mean(c.mean) + "," + std::to_string(c.achieved) + "," + std::to_string(c.total) +
             "," + std::to_string(a.trials) + "," + std::to_string(a.aborted) + "," + match + "," +
             ext + "\n";
    }
  }
  return out;
}

MilestoneTable report_from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
  MilestoneTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    try {
      if (f.size() != 15) throw std::invalid_argument("expected 15 columns");
      if (std::stoi(f[0]) != kReportSchemaVersion) throw std::invalid_argument("unsupported schema_version");
      if (t.arms.empty() || t.arms.back().arm != f[1]) {
        ArmSummary a;
        a.arm = f[1];
        a.trials = std::stoi(f[6]);
        a.aborted = std::stoi(f[7]);
        if (!f[8].empty()) {
          MatchStats m;
          m.pairs_total = std::stoi(f[8]);
          m.pairs_matched = std::stoi(f[9]);
          m.excluded = std::stoi(f[10]);
          m.rate = static_cast<double>(m.pairs_matched) / m.pairs_total;
          a.match = m;
        }
        if (!f[13].empty()) {
          ExtractionStats e;
          for (const auto& kv : split(f[12], ';')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad extraction field");
            e.fields[kv.substr(0, eq)] = parse_fraction(kv.substr(eq + 1));
          }
          e.overall = parse_fraction(f[13]);
          a.extraction = e;
        }
        t.arms.push_back(std::move(a));
      }
      MilestoneCell c;
      c.milestone = f[2];
      if (f[3] != "—") c.mean = std::stod(f[3]);
      c.achieved = std::stoi(f[4]);
      c.total = std::stoi(f[5]);
      t.arms.back().cells.push_back(std::move(c));
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

json report_json(const MilestoneTable& table) {
  json arms = json::array();
  for (const auto& a : table.arms) {
    json cells = json::array();
    for (const auto& c : a.cells) {
      cells.push_back({{"milestone", c.milestone},
                       {"mean", c.mean ? json(*c.mean) : json(nullptr)},
                       {"mean_text", format_mean(c.mean)},
                       {"achieved", c.achieved},
                       {"total", c.total}});
    }
    json match = nullptr;
    if (a.match) {
      match = {{"pairs_total", a.match->pairs_total},
               {"pairs_matched", a.match->pairs_matched},
               {"excluded", a.match->excluded},
               {"rate", a.match->rate}};
    }
    json ext = nullptr;
    if (a.extraction) {
      json fields = json::object();
      for (const auto& [name, c] : a.extraction->fields) {
        fields[name] = {{"extracted", c.extracted}, {"total", c.total}, {"rate", c.rate()}};
      }
      ext = {{"fields", std::move(fields)},
             {"overall",
              {{"extracted", a.extraction->overall.extracted},
               {"total", a.extraction->overall.total},
               {"rate", a.extraction->overall.rate()}}}};
    }
    arms.push_back({{"arm", a.arm},
                    {"trials", a.trials},
                    {"aborted", a.aborted},
                    {"milestones", std::move(cells)},
                    {"match", std::move(match)},
                    {"extraction", std::move(ext)}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"arms", std::move(arms)}, {"notes", {kCensorNote}}};
}

std::string report_text(const MilestoneTable& table) {
  std::ostringstream os;
  std::vector<std::string> milestones;
  for (const auto& a : table.arms) {
    for (const auto& c : a.cells) {
      if (std::find(milestones.begin(), milestones.end(), c.milestone) == milestones.end()) {
        milestones.push_back(c.milestone);
      }
    }
  }
  os << "| arm | trials |";
  for (const auto& m : milestones) os << " " << m << " |";
  os << " match rate | extraction rate |\n|---|---|";
  for (std::size_t i = 0; i < milestones.size(); ++i) os << "---|";
  os << "---|---|\n";
  for (const auto& a : table.arms) {
    os << "| " << a.arm << " | " << a.trials;
    if (a.aborted > 0) os << " (" << a.aborted << " aborted)";
    os << " |";
    for (const auto& m : milestones) {
      auto it = std::find_if(a.cells.begin(), a.cells.end(), [&](const auto& c) { return c.milestone == m; });
      if (it == a.cells.end()) {
        os << " — |";
      } else {
        os << " " << format_mean(it->mean) << " (" << it->achieved << "/" << it->total << ") |";
      }
    }
    if (a.match) {
      os << " " << fixed(a.match->rate * 100.0, 2) << "% (" << a.match->pairs_matched << "/"
         << a.match->pairs_total << ") |";
    } else {
      os << " — |";
    }
    if (a.extraction) {
      os << " " << fixed(a.extraction->overall.rate() * 100.0, 1) << "% ("
         << fraction(a.extraction->overall) << ") |";
    } else {
      os << " — |";
    }
    os << "\n";
  }
  os << "\nNote: " << kCensorNote << "\n";
  return os.str();
}

std::vector<std::filesystem::path> export_report(const MilestoneTable& table, const std::string& format,
                                                 const std::filesystem::path& dir) {
  if (format != "csv" && format != "json" && format != "all") {
    throw ConfigError("unknown report format '" + format + "'");
  }
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto put = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out.flush()) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  };
  if (format == "csv" || format == "all") put("report.csv", report_csv(table));
  if (format == "json" || format == "all") put("report.json", report_json(table).dump(2) + "\n");
  return written;
}

}  // namespace craftagent
