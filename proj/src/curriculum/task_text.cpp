#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "craftagent/curriculum/curriculum.hpp"

namespace craftagent {

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::missing_task:
      return "missing_task";
    case ParseErrorKind::unknown_verb:
      return "unknown_verb";
    case ParseErrorKind::unknown_item:
      return "unknown_item";
    case ParseErrorKind::bad_quantity:
      return "bad_quantity";
    case ParseErrorKind::missing_response2:
      return "missing_response2";
  }
  return "missing_task";
}

namespace {

constexpr std::array<std::string_view, 21> kNumberWords = {
    "zero",   "one",     "two",      "three",    "four",     "five",    "six",
    "seven",  "eight",   "nine",     "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};

// Last words that take a plural "s" when count > 1.
bool countable(std::string_view last_word) {
  static const std::set<std::string, std::less<>> words = {
      "log", "stick", "ingot", "pickaxe", "table", "sapling", "furnace", "plank"};
  return words.contains(last_word);
}

bool starts_with_vowel(std::string_view s) {
  return !s.empty() && std::string_view("aeiou").find(s.front()) != std::string_view::npos;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<Verb> verb_word(std::string_view w) {
  if (auto v = verb_from_string(w)) return v;
  static const std::map<std::string, Verb, std::less<>> synonyms = {
      {"collect", Verb::obtain}, {"gather", Verb::obtain}, {"get", Verb::obtain},
      {"chop", Verb::obtain},    {"acquire", Verb::obtain}, {"dig", Verb::mine},
      {"make", Verb::craft},     {"build", Verb::craft},   {"cook", Verb::smelt},
      {"put", Verb::place},      {"search", Verb::explore}, {"find", Verb::explore},
      {"look", Verb::explore},   {"locate", Verb::explore}};
  auto it = synonyms.find(w);
  return it == synonyms.end() ? std::nullopt : std::optional<Verb>(it->second);
}

std::optional<std::string> resolve_item(const std::string& name,
                                        const std::set<std::string, std::less<>>& vocab) {
  static const std::map<std::string, std::string, std::less<>> aliases = {
      {"wood", "wood_log"},
      {"log", "wood_log"},
      {"wooden_log", "wood_log"},
      {"tree", "wood_log"},
      {"wooden_planks", "planks"},
      {"wood_planks", "planks"},
      {"wooden_plank", "planks"},
      {"wood_plank", "planks"},
      {"plank", "planks"},
      {"gold_pickaxe", "golden_pickaxe"},
      {"golden_ingot", "gold_ingot"},
      {"table", "crafting_table"},
      {"workbench", "crafting_table"},
      {"crafting_bench", "crafting_table"},
      {"cobble", "cobblestone"}};
  const auto lookup = [&](const std::string& n) -> std::optional<std::string> {
    if (vocab.contains(n)) return n;
    if (auto it = aliases.find(n); it != aliases.end()) return it->second;
    return std::nullopt;
  };
  if (auto hit = lookup(name)) return hit;
  if (name.size() > 1 && name.back() == 's') {
    if (auto hit = lookup(name.substr(0, name.size() - 1))) return hit;
  }
  return std::nullopt;
}

bool filler(std::string_view w) {
  return w == "for" || w == "to" || w == "find" || w == "locate" || w == "more" ||
         w == "additional" || w == "of";
}

}  // namespace

std::string render_task(const Task& task) {
  std::string verb(to_string(task.verb));
  verb[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(verb[0])));
  std::string item = task.item;
  std::replace(item.begin(), item.end(), '_', ' ');
  std::string qty;
  if (task.count == 1) {
    switch (task.verb) {
      case Verb::obtain:
      case Verb::mine:
      case Verb::explore:
        qty = starts_with_vowel(item) ? "an" : "a";
        break;
      case Verb::place:
        qty = "the";
        break;
      case Verb::craft:
      case Verb::smelt:
        qty = "1";
        break;
    }
  } else {
    qty = std::to_string(task.count);
    const auto sp = item.rfind(' ');
    if (countable(sp == std::string::npos ? item : std::string_view(item).substr(sp + 1))) {
      item += "s";
    }
  }
  return verb + " " + qty + " " + item + ".";
}

Task parse_task(std::string_view text, const Rules& rules) {
  std::string s = lower(text);
  std::replace_if(
      s.begin(), s.end(), [](char c) { return c == '*' || c == '`' || c == '"' || c == ','; }, ' ');
  while (!s.empty() && (std::isspace(static_cast<unsigned char>(s.back())) || s.back() == '.' ||
                        s.back() == '!')) {
    s.pop_back();
  }
  std::vector<std::string> words;
  for (std::size_t i = 0; i < s.size();) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  if (words.empty()) throw ParseError(ParseErrorKind::missing_task, "empty task text");

  Task task;
  const auto verb = verb_word(words[0]);
  if (!verb) throw ParseError(ParseErrorKind::unknown_verb, words[0]);
  task.verb = *verb;

  std::size_t i = 1;
  while (i < words.size() && filler(words[i])) ++i;
  if (i < words.size()) {
    const std::string& w = words[i];
    const auto word = std::find(kNumberWords.begin(), kNumberWords.end(), w);
    if (!w.empty() && (std::isdigit(static_cast<unsigned char>(w[0])) || w[0] == '-')) {
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(w, &used);
        if (used != w.size()) n = 0;
      } catch (const std::exception&) {
        n = 0;
      }
      if (n <= 0) throw ParseError(ParseErrorKind::bad_quantity, w);
      task.count = n;
      ++i;
    } else if (word != kNumberWords.end()) {
      task.count = static_cast<int>(word - kNumberWords.begin());
      if (task.count == 0) throw ParseError(ParseErrorKind::bad_quantity, w);
      ++i;
    } else if (w == "a" || w == "an" || w == "the" || w == "some") {
      ++i;
    }
  }
  while (i < words.size() && filler(words[i])) ++i;
  if (i >= words.size()) throw ParseError(ParseErrorKind::unknown_item, "no item in '" + s + "'");

  // Longest leading run of words naming a known item.
  const auto vocab = rules.vocabulary();
  for (std::size_t end = words.size(); end > i; --end) {
    std::string name = words[i];
    for (std::size_t k = i + 1; k < end; ++k) name += "_" + words[k];
    if (auto item = resolve_item(name, vocab)) {
      task.item = *item;
      return task;
    }
  }
  throw ParseError(ParseErrorKind::unknown_item, s.substr(s.find(words[i])));
}

}  // namespace craftagent
