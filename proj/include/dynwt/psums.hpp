#pragma once

// Searchable partial sums over a dynamic list of non-negative counters,
// kept in an implicit treap with subtree sums.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace dynwt {

class partial_sums {
 public:
  size_t size() const { return root_ == kNil ? 0 : nodes_[root_].size; }
  uint64_t total() const { return root_ == kNil ? 0 : nodes_[root_].sum; }

  /// Sum of entries 1..j.
  uint64_t sum(size_t j) const;
  /// Smallest j with sum(j) >= i, and i - sum(j-1).
  std::pair<size_t, uint64_t> search(uint64_t i) const;
  uint64_t value(size_t j) const;

  void add(size_t j, int64_t delta);
  /// Inserts a new entry that becomes entry j (1 <= j <= size()+1).
  void insert(size_t j, uint64_t value = 0);
  /// Removes entry j, which must be zero.
  void remove(size_t j);
  void clear();

  std::vector<uint64_t> values() const;
  size_t heap_bytes() const { return nodes_.capacity() * sizeof(node) + free_.capacity() * 4; }

 private:
  static constexpr uint32_t kNil = 0xffffffffu;
  struct node {
    uint32_t left = kNil;
    uint32_t right = kNil;
    uint32_t prio = 0;
    uint32_t size = 1;
    uint64_t val = 0;
    uint64_t sum = 0;
  };

  uint32_t size_of(uint32_t x) const { return x == kNil ? 0 : nodes_[x].size; }
  uint64_t sum_of(uint32_t x) const { return x == kNil ? 0 : nodes_[x].sum; }
  void pull(uint32_t x);
  uint32_t merge(uint32_t a, uint32_t b);
  void split(uint32_t x, size_t k, uint32_t& a, uint32_t& b);
  uint32_t find(size_t j) const;
  void add_at(uint32_t x, size_t j, int64_t delta);
  void collect(uint32_t x, std::vector<uint64_t>& out) const;
  uint32_t next_prio();

  std::vector<node> nodes_;
  std::vector<uint32_t> free_;
  uint32_t root_ = kNil;
  uint64_t seed_ = 0x9e3779b97f4a7c15ull;
};

}  // namespace dynwt
