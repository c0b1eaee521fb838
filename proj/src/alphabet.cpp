#include "dynwt/alphabet.hpp"

#include <string>

#include "dynwt/errors.hpp"

namespace dynwt {

std::optional<uint64_t> alphabet_map::slot_of(uint64_t symbol) const {
  auto it = to_slot_.find(symbol);
  if (it == to_slot_.end()) return std::nullopt;
  return it->second;
}

uint64_t alphabet_map::symbol_of(uint64_t slot) const {
  if (slot == 0 || slot >= count_.size() || count_[slot] == 0)
    fail(errc::not_found, "slot " + std::to_string(slot) + " is not live");
  return to_symbol_[slot];
}

uint64_t alphabet_map::occurrences(uint64_t slot) const {
  return slot < count_.size() ? count_[slot] : 0;
}

uint64_t alphabet_map::count(uint64_t symbol) const {
  auto s = slot_of(symbol);
  return s ? count_[*s] : 0;
}

uint64_t alphabet_map::acquire(uint64_t symbol) {
  if (auto s = slot_of(symbol)) {
    ++count_[*s];
    return *s;
  }
  uint64_t slot;
  if (!free_.empty()) {
    slot = *free_.begin();
    free_.erase(free_.begin());
  } else {
    if (next_ > capacity_) fail(errc::overflow, "alphabet slot space exhausted");
    slot = next_++;
    to_symbol_.resize(next_, 0);
    count_.resize(next_, 0);
  }
  to_slot_.emplace(symbol, slot);
  to_symbol_[slot] = symbol;
  count_[slot] = 1;
  return slot;
}

void alphabet_map::release(uint64_t symbol) {
  auto s = slot_of(symbol);
  if (!s) fail(errc::not_found, "symbol " + std::to_string(symbol) + " is not mapped");
  if (--count_[*s] == 0) {
    to_slot_.erase(symbol);
    to_symbol_[*s] = 0;
    free_.insert(*s);
  }
}

std::vector<uint64_t> alphabet_map::live_slots() const {
  std::vector<uint64_t> out;
  for (uint64_t s = 1; s < count_.size(); ++s)
    if (count_[s]) out.push_back(s);
  return out;
}

void alphabet_map::restore(
    uint64_t capacity, uint64_t next_unused, const std::set<uint64_t>& free,
    const std::vector<std::pair<uint64_t, std::pair<uint64_t, uint64_t>>>& live) {
  capacity_ = capacity;
  next_ = next_unused;
  free_ = free;
  to_slot_.clear();
  to_symbol_.assign(next_, 0);
  count_.assign(next_, 0);
  for (const auto& [slot, sc] : live) {
    if (slot == 0 || slot >= next_ || sc.second == 0 || free_.count(slot))
      fail(errc::bad_format, "inconsistent alphabet table");
    to_slot_.emplace(sc.first, slot);
    to_symbol_[slot] = sc.first;
    count_[slot] = sc.second;
  }
}

size_t alphabet_map::heap_bytes() const {
  return to_slot_.size() * (2 * sizeof(uint64_t) + 2 * sizeof(void*)) +
         (to_symbol_.capacity() + count_.capacity()) * sizeof(uint64_t) +
         free_.size() * (sizeof(uint64_t) + 4 * sizeof(void*));
}

}  // namespace dynwt
