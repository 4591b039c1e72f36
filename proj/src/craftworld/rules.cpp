#include "craftagent/craftworld/rules.hpp"

#include <algorithm>

#include "craftagent/util/hash.hpp"

namespace craftagent {

using nlohmann::json;

std::string_view to_string(Station s) {
  switch (s) {
    case Station::none:
      return "none";
    case Station::crafting_table:
      return "crafting_table";
    case Station::furnace:
      return "furnace";
  }
  return "none";
}

std::optional<Station> station_from_string(std::string_view name) {
  if (name == "none") return Station::none;
  if (name == "crafting_table") return Station::crafting_table;
  if (name == "furnace") return Station::furnace;
  return std::nullopt;
}

BlockKind station_block(Station s) {
  return s == Station::furnace ? BlockKind::furnace : BlockKind::crafting_table;
}

bool Recipe::produces(std::string_view item) const {
  return std::any_of(outputs.begin(), outputs.end(),
                     [&](const ItemCount& out) { return key_matches(item, out.first); });
}

int Recipe::output_count(std::string_view item) const {
  int n = 0;
  for (const auto& [out, count] : outputs) {
    if (key_matches(item, out)) n += count;
  }
  return n;
}

const Rules& Rules::defaults() {
  static const Rules rules = [] {
    Rules r;
    const auto table = Station::crafting_table;
    const auto furnace = Station::furnace;
    r.recipes = {
        {"oak_planks", {{"oak_log", 1}}, {{"oak_planks", 4}}, Station::none, 0},
        {"spruce_planks", {{"spruce_log", 1}}, {{"spruce_planks", 4}}, Station::none, 0},
        {"birch_planks", {{"birch_log", 1}}, {{"birch_planks", 4}}, Station::none, 0},
        {"stick", {{"planks", 2}}, {{"stick", 4}}, Station::none, 0},
        {"crafting_table", {{"planks", 4}}, {{"crafting_table", 1}}, Station::none, 0},
        {"wooden_pickaxe", {{"planks", 3}, {"stick", 2}}, {{"wooden_pickaxe", 1}}, table, 0},
        {"stone_pickaxe", {{"cobblestone", 3}, {"stick", 2}}, {{"stone_pickaxe", 1}}, table, 0},
        {"furnace", {{"cobblestone", 8}}, {{"furnace", 1}}, table, 0},
        {"iron_pickaxe", {{"iron_ingot", 3}, {"stick", 2}}, {{"iron_pickaxe", 1}}, table, 0},
        {"golden_pickaxe", {{"gold_ingot", 3}, {"stick", 2}}, {{"golden_pickaxe", 1}}, table, 0},
        {"iron_ingot", {{"raw_iron", 1}}, {{"iron_ingot", 1}}, furnace, 1},
        {"gold_ingot", {{"raw_gold", 1}}, {{"gold_ingot", 1}}, furnace, 1},
    };
    r.mining = {
        {BlockKind::oak_log, "oak_log", 1, ToolTier::hand},
        {BlockKind::spruce_log, "spruce_log", 1, ToolTier::hand},
        {BlockKind::birch_log, "birch_log", 1, ToolTier::hand},
        {BlockKind::stone, "cobblestone", 1, ToolTier::wooden},
        {BlockKind::coal_ore, "coal", 1, ToolTier::wooden},
        {BlockKind::iron_ore, "raw_iron", 1, ToolTier::stone},
        {BlockKind::gold_ore, "raw_gold", 1, ToolTier::iron},
    };
    r.fuel = {"coal", "planks"};
    r.pickups = {{"zombie", "rotten_flesh"}};
    r.tools = {
        {"wooden_pickaxe", ToolTier::wooden},
        {"golden_pickaxe", ToolTier::wooden},
        {"stone_pickaxe", ToolTier::stone},
        {"iron_pickaxe", ToolTier::iron},
    };
    r.station_radius = 3;
    return r;
  }();
  return rules;
}

const Recipe* Rules::find_recipe(std::string_view id) const {
  for (const auto& r : recipes) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const Recipe* Rules::producer_of(std::string_view item, const Inventory* inv) const {
  const Recipe* first = nullptr;
  for (const auto& r : recipes) {
    if (!r.produces(item)) continue;
    if (first == nullptr) first = &r;
    if (inv == nullptr) break;
    const bool covered = std::all_of(r.inputs.begin(), r.inputs.end(), [&](const ItemCount& in) {
      return inv->has(in.first, in.second);
    });
    if (covered) return &r;
  }
  return first;
}

const Recipe* Rules::smelting_of(std::string_view input) const {
  for (const auto& r : recipes) {
    if (!r.is_smelting()) continue;
    for (const auto& in : r.inputs) {
      if (key_matches(in.first, input) || key_matches(input, in.first)) return &r;
    }
  }
  return nullptr;
}

const MiningRule* Rules::mining_rule(BlockKind block) const {
  for (const auto& m : mining) {
    if (m.block == block) return &m;
  }
  return nullptr;
}

const MiningRule* Rules::source_of(std::string_view item) const {
  for (const auto& m : mining) {
    if (key_matches(item, m.yield)) return &m;
  }
  return nullptr;
}

std::optional<ToolTier> Rules::tool_tier(std::string_view item) const {
  for (const auto& t : tools) {
    if (t.item == item) return t.tier;
  }
  return std::nullopt;
}

std::string Rules::pickaxe_for(ToolTier tier) const {
  // Lowest tool meeting the tier, in table order on ties.
  const ToolRule* best = nullptr;
  for (const auto& t : tools) {
    if (t.tier < tier) continue;
    if (best == nullptr || t.tier < best->tier) best = &t;
  }
  return best ? best->item : std::string{};
}

bool Rules::is_fuel(std::string_view item) const {
  return std::any_of(fuel.begin(), fuel.end(),
                     [&](const std::string& key) { return key_matches(key, item); });
}

int Rules::fuel_units(const Inventory& inv) const {
  int units = 0;
  for (const auto& [item, n] : inv.items()) {
    if (is_fuel(item)) units += n;
  }
  return units;
}

std::vector<ItemCount> Rules::consume_fuel(Inventory& inv, int n) const {
  std::vector<ItemCount> taken;
  for (const auto& key : fuel) {
    if (n == 0) break;
    const int take = std::min(n, inv.count_matching(key));
    if (take == 0) continue;
    auto part = inv.remove_matching(key, take);
    taken.insert(taken.end(), part.begin(), part.end());
    n -= take;
  }
  return taken;
}

const std::vector<std::string>& extra_items() {
  static const std::vector<std::string> items = {"rotten_flesh", "oak_sapling", "spruce_sapling",
                                                 "birch_sapling", "wood_log", "planks"};
  return items;
}

std::set<std::string, std::less<>> Rules::vocabulary() const {
  std::set<std::string, std::less<>> vocab(extra_items().begin(), extra_items().end());
  for (const auto& r : recipes) {
    for (const auto& [item, n] : r.inputs) vocab.insert(item);
    for (const auto& [item, n] : r.outputs) vocab.insert(item);
  }
  for (const auto& m : mining) {
    vocab.insert(m.yield);
    vocab.insert(std::string(to_string(m.block)));
  }
  for (const auto& p : pickups) vocab.insert(p.item);
  for (const auto& t : tools) vocab.insert(t.item);
  return vocab;
}

namespace {

json counts_to_json(const std::vector<ItemCount>& v) {
  json arr = json::array();
  for (const auto& [item, n] : v) arr.push_back(json::array({item, n}));
  return arr;
}

std::vector<ItemCount> counts_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected array of [item, count]");
  std::vector<ItemCount> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer()) {
      throw ConfigError(where + ": expected [item, count] pair");
    }
    out.emplace_back(e[0].get<std::string>(), e[1].get<int>());
  }
  return out;
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

json Rules::to_json() const {
  json j;
  json rs = json::array();
  for (const auto& r : recipes) {
    rs.push_back({{"id", r.id},
                  {"inputs", counts_to_json(r.inputs)},
                  {"outputs", counts_to_json(r.outputs)},
                  {"station", std::string(to_string(r.station))},
                  {"fuel_cost", r.fuel_cost}});
  }
  j["recipes"] = rs;
  json ms = json::array();
  for (const auto& m : mining) {
    ms.push_back({{"block", std::string(to_string(m.block))},
                  {"yield", m.yield},
                  {"count", m.yield_count},
                  {"min_tier", std::string(to_string(m.min_tier))}});
  }
  j["mining"] = ms;
  j["fuel"] = fuel;
  json ps = json::array();
  for (const auto& p : pickups) ps.push_back({{"entity", p.entity}, {"item", p.item}});
  j["pickups"] = ps;
  json ts = json::array();
  for (const auto& t : tools) ts.push_back({{"item", t.item}, {"tier", std::string(to_string(t.tier))}});
  j["tools"] = ts;
  j["station_radius"] = station_radius;
  return j;
}

Rules Rules::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("rules: expected object");
  Rules r = defaults();
  if (j.contains("recipes")) {
    r.recipes.clear();
    for (const auto& e : j.at("recipes")) {
      Recipe rec;
      rec.id = require<std::string>(e, "id", "recipe");
      const std::string where = "recipe '" + rec.id + "'";
      rec.inputs = counts_from_json(e.value("inputs", json::array()), where);
      rec.outputs = counts_from_json(require<json>(e, "outputs", where), where);
      const auto station = station_from_string(e.value("station", std::string("none")));
      if (!station) throw ConfigError(where + ": unknown station");
      rec.station = *station;
      rec.fuel_cost = e.value("fuel_cost", 0);
      r.recipes.push_back(std::move(rec));
    }
  }
  if (j.contains("mining")) {
    r.mining.clear();
    for (const auto& e : j.at("mining")) {
      MiningRule m;
      const auto block = block_kind_from_string(require<std::string>(e, "block", "mining"));
      if (!block) throw ConfigError("mining: unknown block");
      m.block = *block;
      m.yield = require<std::string>(e, "yield", "mining");
      m.yield_count = e.value("count", 1);
      const auto tier = tool_tier_from_string(e.value("min_tier", std::string("hand")));
      if (!tier) throw ConfigError("mining: unknown tier");
      m.min_tier = *tier;
      r.mining.push_back(std::move(m));
    }
  }
  if (j.contains("fuel")) r.fuel = require<std::vector<std::string>>(j, "fuel", "rules");
  if (j.contains("pickups")) {
    r.pickups.clear();
    for (const auto& e : j.at("pickups")) {
      r.pickups.push_back({require<std::string>(e, "entity", "pickup"),
                           require<std::string>(e, "item", "pickup")});
    }
  }
  if (j.contains("tools")) {
    r.tools.clear();
    for (const auto& e : j.at("tools")) {
      const auto tier = tool_tier_from_string(require<std::string>(e, "tier", "tool"));
      if (!tier) throw ConfigError("tool: unknown tier");
      r.tools.push_back({require<std::string>(e, "item", "tool"), *tier});
    }
  }
  if (j.contains("station_radius")) r.station_radius = require<int>(j, "station_radius", "rules");
  r.validate();
  return r;
}

void Rules::validate() const {
  for (const auto& r : recipes) {
    const std::string where = "recipe '" + r.id + "'";
    if (r.outputs.empty()) throw ConfigError(where + ": outputs must be non-empty");
    if ((r.fuel_cost > 0) != (r.station == Station::furnace)) {
      throw ConfigError(where + ": fuel_cost > 0 exactly when the station is a furnace");
    }
    for (const auto& [item, n] : r.inputs) {
      if (n <= 0) throw ConfigError(where + ": input counts must be positive");
    }
    for (const auto& [item, n] : r.outputs) {
      if (n <= 0) throw ConfigError(where + ": output counts must be positive");
    }
  }
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    for (std::size_t k = i + 1; k < recipes.size(); ++k) {
      if (recipes[i].id == recipes[k].id) throw ConfigError("duplicate recipe id " + recipes[i].id);
    }
  }
  if (station_radius < 1) throw ConfigError("station_radius must be >= 1");
}

std::string Rules::fingerprint() const { return sha256_hex(to_json().dump()); }

}  // namespace craftagent
