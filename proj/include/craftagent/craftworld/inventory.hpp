#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace craftagent {

inline constexpr int kInventorySlots = 36;

// Species-generic class of an item: any *_log is "wood_log", any *_planks is
// "planks". Everything else is its own class.
std::string item_class(std::string_view item);

// True when `key` names `item` exactly or names its class.
bool key_matches(std::string_view key, std::string_view item);

// Item -> count, one item kind per slot.
class Inventory {
 public:
  Inventory() = default;
  Inventory(std::initializer_list<std::pair<const std::string, int>> init);

  int count(std::string_view item) const;
  // Sum over every held item that `key` matches (exact item or class).
  int count_matching(std::string_view key) const;
  bool has(std::string_view key, int n) const { return count_matching(key) >= n; }

  int slots_used() const { return static_cast<int>(counts_.size()); }
  bool can_add(std::string_view item) const;

  // Returns false (and changes nothing) if a new slot would exceed capacity.
  bool add(const std::string& item, int n);
  // Precondition: count(item) >= n.
  void remove(const std::string& item, int n);
  // Removes n units matching `key`, drawing from held items in name order.
  // Precondition: count_matching(key) >= n. Returns what was taken.
  std::vector<std::pair<std::string, int>> remove_matching(std::string_view key, int n);

  const std::map<std::string, int, std::less<>>& items() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  friend bool operator==(const Inventory&, const Inventory&) = default;

 private:
  std::map<std::string, int, std::less<>> counts_;
};

}  // namespace craftagent
