#include "craftagent/perception/perception.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "craftagent/util/hash.hpp"

namespace craftagent {

Observation observe_cheat(const WorldState& state, int radius) {
  Observation o;
  o.inventory = state.inventory;
  o.equipment = state.equipped;
  o.health = state.health;
  o.hunger = state.hunger;
  o.position = state.player;
  o.nearby_blocks = nearby_blocks(state, radius);
  o.nearby_entities = nearby_entities(state, radius);
  o.time_of_day = state.time_of_day;
  o.biome = state.biome_at(state.player);
  return o;
}

namespace glyph {

char for_block(BlockKind kind) {
  switch (kind) {
    case BlockKind::ground:
      return '.';
    case BlockKind::oak_log:
      return 'o';
    case BlockKind::spruce_log:
      return 's';
    case BlockKind::birch_log:
      return 'b';
    case BlockKind::stone:
      return '#';
    case BlockKind::iron_ore:
      return 'i';
    case BlockKind::gold_ore:
      return 'g';
    case BlockKind::coal_ore:
      return 'c';
    case BlockKind::water:
      return '~';
    case BlockKind::crafting_table:
      return 'T';
    case BlockKind::furnace:
      return 'F';
    case BlockKind::unknown:
      return kUnknown;
  }
  return kUnknown;
}

char for_entity(std::string_view kind) {
  if (kind == "zombie") return 'Z';
  if (kind == "cow") return 'C';
  return 'E';
}

std::optional<BlockKind> block_for(char c) {
  for (int i = 0; i < kBlockKindCount; ++i) {
    const auto k = static_cast<BlockKind>(i);
    if (k != BlockKind::unknown && for_block(k) == c) return k;
  }
  return std::nullopt;
}

std::optional<std::string> entity_for(char c) {
  switch (c) {
    case 'Z':
      return "zombie";
    case 'C':
      return "cow";
    case 'E':
      return "entity";
    default:
      return std::nullopt;
  }
}

char for_time(TimeOfDay t) { return t == TimeOfDay::day ? 'D' : 'N'; }

char for_biome(Biome b) {
  switch (b) {
    case Biome::forest:
      return 'F';
    case Biome::taiga:
      return 'T';
    case Biome::plains:
      return 'P';
    case Biome::mountains:
      return 'M';
  }
  return kAbsent;
}

}  // namespace glyph

namespace {

std::optional<std::string> time_from_glyph(char c) {
  if (c == 'D') return "day";
  if (c == 'N') return "night";
  return std::nullopt;
}

std::optional<std::string> biome_from_glyph(char c) {
  for (Biome b : {Biome::forest, Biome::taiga, Biome::plains, Biome::mountains}) {
    if (glyph::for_biome(b) == c) return std::string(to_string(b));
  }
  return std::nullopt;
}

// round(num / den) with halves away from zero; den > 0.
int round_div(int num, int den) {
  const int mag = (2 * std::abs(num) + den) / (2 * den);
  return num < 0 ? -mag : mag;
}

}  // namespace

bool VisualFrame::fully_unknown() const {
  for (int dy = -radius(); dy <= radius(); ++dy) {
    for (int dx = -radius(); dx <= radius(); ++dx) {
      if ((dx != 0 || dy != 0) && at(dx, dy) != glyph::kUnknown) return false;
    }
  }
  return true;
}

std::string VisualFrame::serialize() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(size) * (size + 1) + 8);
  for (int y = 0; y < size; ++y) {
    out.append(cells.begin() + static_cast<std::ptrdiff_t>(y) * size,
               cells.begin() + static_cast<std::ptrdiff_t>(y + 1) * size);
    out.push_back('\n');
  }
  out += "hud:";
  out.push_back(time_glyph);
  out.push_back(biome_glyph);
  return out;
}

VisualFrame VisualFrame::parse(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.size() < 2) throw std::invalid_argument("frame: too few lines");
  const std::string_view hud = lines.back();
  if (hud.size() != 6 || hud.substr(0, 4) != "hud:") throw std::invalid_argument("frame: bad hud line");
  lines.pop_back();
  VisualFrame f;
  f.size = static_cast<int>(lines.size());
  if (f.size % 2 == 0) throw std::invalid_argument("frame: size must be odd");
  for (auto line : lines) {
    if (static_cast<int>(line.size()) != f.size) throw std::invalid_argument("frame: ragged row");
    f.cells.insert(f.cells.end(), line.begin(), line.end());
  }
  f.time_glyph = hud[4];
  f.biome_glyph = hud[5];
  return f;
}

std::vector<Pos> sight_line(Pos from, Pos to) {
  const int dx = to.x - from.x;
  const int dy = to.y - from.y;
  const int n = std::max(std::abs(dx), std::abs(dy));
  std::vector<Pos> cells;
  for (int k = 1; k < n; ++k) {
    cells.push_back({from.x + round_div(k * dx, n), from.y + round_div(k * dy, n)});
  }
  return cells;
}

bool line_of_sight(const WorldState& state, Pos from, Pos to) {
  for (Pos c : sight_line(from, to)) {
    if (state.in_bounds(c) && is_opaque(state.at(c))) return false;
  }
  return true;
}

VisualFrame render_frame(const WorldState& state, int window_size, const PerceptionConfig& config) {
  if (window_size < 5 || window_size % 2 == 0) {
    throw std::invalid_argument("window size must be odd and >= 5");
  }
  VisualFrame f;
  f.size = window_size;
  f.cells.assign(static_cast<std::size_t>(window_size) * window_size, glyph::kUnknown);
  f.frame_id = splitmix64(state.rng_seed ^ splitmix64(static_cast<std::uint64_t>(state.tick)));
  const int r = window_size / 2;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const Pos p{state.player.x + dx, state.player.y + dy};
      char& cell = f.cells[static_cast<std::size_t>(dy + r) * window_size + (dx + r)];
      if (dx == 0 && dy == 0) {
        cell = glyph::kPlayer;
        continue;
      }
      if (!state.in_bounds(p) || !line_of_sight(state, state.player, p)) continue;
      cell = glyph::for_block(state.at(p));
      for (const auto& e : state.entities) {
        if (e.pos == p) {
          cell = glyph::for_entity(e.kind);
          break;
        }
      }
    }
  }
  f.biome_glyph = glyph::for_biome(state.biome_at(state.player));
  f.time_glyph = glyph::for_time(state.time_of_day);
  if (state.time_of_day == TimeOfDay::night &&
      unit_interval(splitmix64(f.frame_id ^ 0x7469'6d65ULL)) < config.night_time_hidden_fraction) {
    f.time_glyph = glyph::kAbsent;
  }
  return f;
}

ElementReport encode_elements(const VisualFrame& frame, double dropout) {
  ElementReport rep;
  rep.biome = biome_from_glyph(frame.biome_glyph);
  rep.time = time_from_glyph(frame.time_glyph);
  if (!frame.fully_unknown()) {
    std::vector<SeenBlock> blocks;
    std::vector<SeenEntity> entities;
    const int r = frame.radius();
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const char c = frame.at(dx, dy);
        if (auto e = glyph::entity_for(c)) {
          entities.push_back({*e, dx, dy});
        } else if (auto b = glyph::block_for(c); b && *b != BlockKind::ground) {
          blocks.push_back({*b, dx, dy});
        }
      }
    }
    std::sort(blocks.begin(), blocks.end());
    std::sort(entities.begin(), entities.end());
    rep.nearby_blocks = std::move(blocks);
    rep.nearby_entities = std::move(entities);
  }
  if (dropout > 0.0) {
    const auto drop = [&](std::uint64_t field) {
      return unit_interval(splitmix64(frame.frame_id + field)) < dropout;
    };
    if (drop(1)) rep.biome.reset();
    if (drop(2)) rep.time.reset();
    if (drop(3)) rep.nearby_blocks.reset();
    if (drop(4)) rep.nearby_entities.reset();
  }
  return rep;
}

namespace {

// Counts per name, in name order.
template <typename T, typename NameOf>
std::string summarize(const std::vector<T>& seen, NameOf name_of) {
  std::map<std::string, int> counts;
  for (const auto& s : seen) ++counts[name_of(s)];
  std::string out;
  for (const auto& [name, n] : counts) {
    if (!out.empty()) out += ", ";
    out += name;
    if (n > 1) out += " x" + std::to_string(n);
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::string render_elements(const ElementReport& report) {
  std::string out;
  out += "Biome: " + report.biome.value_or("N/A") + "\n";
  out += "Time: " + report.time.value_or("N/A") + "\n";
  out += "Nearby blocks: ";
  out += report.nearby_blocks ? summarize(*report.nearby_blocks,
                                          [](const SeenBlock& b) { return std::string(to_string(b.kind)); })
                              : "N/A";
  out += "\nNearby entities: ";
  out += report.nearby_entities
             ? summarize(*report.nearby_entities, [](const SeenEntity& e) { return e.kind; })
             : "N/A";
  return out;
}

namespace {

// Items (and tools) reachable backwards from the goal through the recipe and
// mining tables.
std::set<std::string, std::less<>> goal_closure(std::string_view goal, const Rules& rules) {
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> stack{std::string(goal)};
  while (!stack.empty()) {
    const std::string item = stack.back();
    stack.pop_back();
    if (!seen.insert(item).second) continue;
    for (const auto& r : rules.recipes) {
      if (!r.produces(item)) continue;
      for (const auto& [in, n] : r.inputs) stack.push_back(in);
      if (r.station != Station::none) stack.emplace_back(to_string(r.station));
      if (r.fuel_cost > 0) stack.insert(stack.end(), rules.fuel.begin(), rules.fuel.end());
    }
    if (const MiningRule* m = rules.source_of(item)) {
      if (m->min_tier != ToolTier::hand) stack.push_back(rules.pickaxe_for(m->min_tier));
    }
  }
  return seen;
}

bool relevant(BlockKind kind, const std::set<std::string, std::less<>>& closure, const Rules& rules) {
  if (is_station(kind)) return closure.contains(to_string(kind));
  const MiningRule* m = rules.mining_rule(kind);
  if (m == nullptr) return false;
  return std::any_of(closure.begin(), closure.end(),
                     [&](const std::string& item) { return key_matches(item, m->yield); });
}

}  // namespace

std::string free_description_template(const ElementReport& report, std::string_view goal_item,
                                      const Rules& rules) {
  if (!report.nearby_blocks) return "N/A";
  const auto closure = goal_closure(goal_item, rules);
  std::map<std::string, std::pair<int, int>> resources;  // name -> (count, nearest)
  for (const auto& b : *report.nearby_blocks) {
    if (!relevant(b.kind, closure, rules)) continue;
    const int dist = std::max(std::abs(b.dx), std::abs(b.dy));
    auto [it, inserted] = resources.try_emplace(std::string(to_string(b.kind)), 0, dist);
    it->second.first += 1;
    it->second.second = std::min(it->second.second, dist);
  }
  std::string out;
  if (resources.empty()) {
    out = "No resources useful for the goal are visible.";
  } else {
    out = "Useful resources in view:";
    bool first = true;
    for (const auto& [name, cn] : resources) {
      out += first ? " " : ", ";
      first = false;
      out += name + " x" + std::to_string(cn.first) + " (nearest " + std::to_string(cn.second) +
             (cn.second == 1 ? " block away)" : " blocks away)");
    }
    out += ".";
  }
  if (report.nearby_entities && !report.nearby_entities->empty()) {
    out += " Creatures in view: " +
           summarize(*report.nearby_entities, [](const SeenEntity& e) { return e.kind; }) + ".";
  }
  if (report.time) out += " It is " + *report.time + ".";
  if (report.biome) out += " The biome looks like " + *report.biome + ".";
  return out;
}

bool FreeDescription::is_na() const {
  if (encoding_failed) return true;
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  return t.empty() || t == "N/A";
}

double ExtractionStats::rate(const std::string& field) const {
  auto it = fields.find(field);
  return it == fields.end() ? 0.0 : it->second.rate();
}

void accumulate(ExtractionStats& stats, const VisionOutput& output) {
  const auto tally = [&](const char* field, bool extracted) {
    auto& c = stats.fields[field];
    ++c.total;
    ++stats.overall.total;
    if (extracted) {
      ++c.extracted;
      ++stats.overall.extracted;
    }
  };
  if (const auto* rep = std::get_if<ElementReport>(&output)) {
    tally("biome", rep->biome.has_value());
    tally("time", rep->time.has_value());
    tally("nearby_blocks", rep->nearby_blocks.has_value());
    tally("nearby_entities", rep->nearby_entities.has_value());
  } else {
    tally("description", !std::get<FreeDescription>(output).is_na());
  }
}

ExtractionStats extraction_stats(const std::vector<VisionOutput>& outputs) {
  if (outputs.empty()) throw std::invalid_argument("extraction_stats needs at least one output");
  ExtractionStats stats;
  for (const auto& o : outputs) accumulate(stats, o);
  return stats;
}

}  // namespace craftagent
