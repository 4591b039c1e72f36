#include "craftagent/craftworld/inventory.hpp"

#include <cassert>

namespace craftagent {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string item_class(std::string_view item) {
  if (item == "wood_log" || ends_with(item, "_log")) return "wood_log";
  if (item == "planks" || ends_with(item, "_planks")) return "planks";
  return std::string(item);
}

bool key_matches(std::string_view key, std::string_view item) {
  return key == item || item_class(item) == key;
}

Inventory::Inventory(std::initializer_list<std::pair<const std::string, int>> init) {
  for (const auto& [item, n] : init) {
    if (n > 0) counts_[item] += n;
  }
}

int Inventory::count(std::string_view item) const {
  auto it = counts_.find(item);
  return it == counts_.end() ? 0 : it->second;
}

int Inventory::count_matching(std::string_view key) const {
  int total = 0;
  for (const auto& [item, n] : counts_) {
    if (key_matches(key, item)) total += n;
  }
  return total;
}

bool Inventory::can_add(std::string_view item) const {
  return counts_.contains(item) || slots_used() < kInventorySlots;
}

bool Inventory::add(const std::string& item, int n) {
  if (n <= 0) return true;
  if (!can_add(item)) return false;
  counts_[item] += n;
  return true;
}

void Inventory::remove(const std::string& item, int n) {
  if (n <= 0) return;
  auto it = counts_.find(item);
  assert(it != counts_.end() && it->second >= n);
  it->second -= n;
  if (it->second == 0) counts_.erase(it);
}

std::vector<std::pair<std::string, int>> Inventory::remove_matching(std::string_view key, int n) {
  std::vector<std::pair<std::string, int>> taken;
  for (auto it = counts_.begin(); it != counts_.end() && n > 0;) {
    if (!key_matches(key, it->first)) {
      ++it;
      continue;
    }
    const int take = std::min(n, it->second);
    taken.emplace_back(it->first, take);
    it->second -= take;
    n -= take;
    if (it->second == 0) {
      it = counts_.erase(it);
    } else {
      ++it;
    }
  }
  assert(n == 0);
  return taken;
}

}  // namespace craftagent
