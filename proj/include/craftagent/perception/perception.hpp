#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "craftagent/craftworld/actions.hpp"
#include "craftagent/craftworld/world.hpp"

namespace craftagent {

inline constexpr int kCheatRadius = 8;
inline constexpr int kFrameWindow = 11;
inline constexpr std::size_t kFreeDescriptionCap = 600;

// The ground-truth channel: exactly the fields the curriculum reads.
struct Observation {
  Inventory inventory;
  std::string equipment;
  int health = kMaxVital;
  int hunger = kMaxVital;
  Pos position;
  std::vector<BlockSighting> nearby_blocks;
  std::vector<Entity> nearby_entities;
  TimeOfDay time_of_day = TimeOfDay::day;
  Biome biome = Biome::plains;

  friend bool operator==(const Observation&, const Observation&) = default;
};

Observation observe_cheat(const WorldState& state, int radius = kCheatRadius);

struct PerceptionConfig {
  int window = kFrameWindow;
  // Share of night frames whose HUD omits the time glyph.
  double night_time_hidden_fraction = 0.5;
  // Optional seeded per-field dropout applied by encode_elements.
  double dropout = 0.0;
  std::size_t free_description_cap = kFreeDescriptionCap;
};

namespace glyph {
inline constexpr char kPlayer = '@';
inline constexpr char kUnknown = '?';
inline constexpr char kAbsent = '-';
char for_block(BlockKind kind);
char for_entity(std::string_view kind);
std::optional<BlockKind> block_for(char c);
std::optional<std::string> entity_for(char c);
char for_time(TimeOfDay t);
char for_biome(Biome b);
}  // namespace glyph

// Player-centred symbolic view. Occluded and off-map cells hold '?'.
//
// Text form: `size` rows of `size` symbols, then a HUD line "hud:<t><b>"
// where <t> is D/N and <b> is F/T/P/M, '-' marking an absent glyph.
struct VisualFrame {
  int size = kFrameWindow;
  std::vector<char> cells;  // row-major, size*size
  char time_glyph = glyph::kAbsent;
  char biome_glyph = glyph::kAbsent;
  std::uint64_t frame_id = 0;  // seed/tick salt for seeded dropout

  int radius() const { return size / 2; }
  char at(int dx, int dy) const {
    return cells[static_cast<std::size_t>(dy + radius()) * size + (dx + radius())];
  }
  bool fully_unknown() const;

  std::string serialize() const;
  static VisualFrame parse(std::string_view text);  // throws std::invalid_argument

  // frame_id is a salt, not content.
  friend bool operator==(const VisualFrame& a, const VisualFrame& b) {
    return a.size == b.size && a.cells == b.cells && a.time_glyph == b.time_glyph &&
           a.biome_glyph == b.biome_glyph;
  }
};

// Cells strictly between `from` and `to` on the rounded straight line. `to`
// is visible from `from` when none of them is opaque.
std::vector<Pos> sight_line(Pos from, Pos to);
bool line_of_sight(const WorldState& state, Pos from, Pos to);

// Throws std::invalid_argument unless window_size is odd and >= 5.
VisualFrame render_frame(const WorldState& state, int window_size = kFrameWindow,
                         const PerceptionConfig& config = {});

struct SeenBlock {
  BlockKind kind;
  int dx = 0;
  int dy = 0;

  friend auto operator<=>(const SeenBlock&, const SeenBlock&) = default;
  friend bool operator==(const SeenBlock&, const SeenBlock&) = default;
};

struct SeenEntity {
  std::string kind;
  int dx = 0;
  int dy = 0;

  friend auto operator<=>(const SeenEntity&, const SeenEntity&) = default;
  friend bool operator==(const SeenEntity&, const SeenEntity&) = default;
};

// nullopt marks an "N/A" field.
struct ElementReport {
  std::optional<std::string> biome;
  std::optional<std::string> time;
  std::optional<std::vector<SeenBlock>> nearby_blocks;
  std::optional<std::vector<SeenEntity>> nearby_entities;

  friend bool operator==(const ElementReport&, const ElementReport&) = default;
};

ElementReport encode_elements(const VisualFrame& frame, double dropout = 0.0);

// The four "Biome/Time/Nearby blocks/Nearby entities" lines.
std::string render_elements(const ElementReport& report);

// Goal-relevant summary of what an element report saw; "N/A" when the frame
// carried no usable information.
std::string free_description_template(const ElementReport& report, std::string_view goal_item,
                                      const Rules& rules = Rules::defaults());

struct FreeDescription {
  std::string text;
  bool encoding_failed = false;

  bool is_na() const;
  friend bool operator==(const FreeDescription&, const FreeDescription&) = default;
};

class PlannerBackend;

// The stored free-description prompt, with the goal phrase swapped in for
// goals other than the golden pickaxe.
std::string vision_prompt(std::string_view goal_item);

// Asks `backend` to describe the frame using the stored free-description
// prompt. Transport failures yield an empty, failed description.
FreeDescription encode_free(const VisualFrame& frame, std::string_view goal_item,
                            PlannerBackend& backend, std::size_t cap = kFreeDescriptionCap);

struct FieldCount {
  int extracted = 0;
  int total = 0;

  double rate() const { return total == 0 ? 0.0 : static_cast<double>(extracted) / total; }
  friend bool operator==(const FieldCount&, const FieldCount&) = default;
};

struct ExtractionStats {
  std::map<std::string, FieldCount> fields;  // biome, time, nearby_blocks, nearby_entities, description
  FieldCount overall;

  double rate(const std::string& field) const;
  friend bool operator==(const ExtractionStats&, const ExtractionStats&) = default;
};

using VisionOutput = std::variant<ElementReport, FreeDescription>;

// Throws std::invalid_argument on an empty sequence.
ExtractionStats extraction_stats(const std::vector<VisionOutput>& outputs);

void accumulate(ExtractionStats& stats, const VisionOutput& output);

}  // namespace craftagent
