#pragma once

// Mapping between external symbols (64-bit integers) and the dense slot
// space [1, s] addressed by the wavelet tree. A slot lives while its symbol
// has at least one alive occurrence; freed slots are reused smallest first.

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace dynwt {

class alphabet_map {
 public:
  explicit alphabet_map(uint64_t capacity = 256) : capacity_(capacity) {}

  uint64_t capacity() const { return capacity_; }
  /// Live slots.
  uint64_t live() const { return to_slot_.size(); }

  std::optional<uint64_t> slot_of(uint64_t symbol) const;
  uint64_t symbol_of(uint64_t slot) const;
  uint64_t occurrences(uint64_t slot) const;
  /// Occurrences of an external symbol; zero when unmapped.
  uint64_t count(uint64_t symbol) const;

  /// Records one more occurrence of `symbol`, mapping it to a slot first
  /// when needed. Returns the slot.
  uint64_t acquire(uint64_t symbol);
  /// Records the loss of one occurrence; frees the slot on the last one.
  void release(uint64_t symbol);

  /// Slots in use, ascending.
  std::vector<uint64_t> live_slots() const;
  const std::set<uint64_t>& free_slots() const { return free_; }
  /// One past the highest slot ever handed out.
  uint64_t next_unused() const { return next_; }

  /// Restores a saved state.
  void restore(uint64_t capacity, uint64_t next_unused, const std::set<uint64_t>& free,
               const std::vector<std::pair<uint64_t, std::pair<uint64_t, uint64_t>>>& live);

  size_t heap_bytes() const;

 private:
  uint64_t capacity_;
  uint64_t next_ = 1;
  std::unordered_map<uint64_t, uint64_t> to_slot_;
  std::vector<uint64_t> to_symbol_{0};  // indexed by slot
  std::vector<uint64_t> count_{0};
  std::set<uint64_t> free_;
};

}  // namespace dynwt
