#pragma once

// Per-node predecessor search over the block chain: for each digit t, the
// set of blocks containing t, queried for the last such block strictly
// before a given one. Blocks carry order labels so comparisons never need
// positional renumbering.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dynwt/linkmesh.hpp"

namespace dynwt {

class split_find {
 public:
  explicit split_find(uint32_t rho = 2);

  uint32_t arity() const { return static_cast<uint32_t>(marks_.size()); }
  size_t size() const { return order_.size(); }
  bool contains(block_id id) const { return label_.count(id) != 0; }

  /// Inserts `id` right after `after`, or at the head when after == kNoBlock.
  void insert_block(block_id after, block_id id);
  void erase_block(block_id id);

  void mark(uint32_t t, block_id id);
  void unmark(uint32_t t, block_id id);
  bool marked(uint32_t t, block_id id) const;

  /// Nearest marked block strictly before `id`.
  std::optional<block_id> find(uint32_t t, block_id id) const;

  /// Resets to `chain` (in order), marking t in a block iff has(block, t).
  void rebuild(const std::vector<block_id>& chain,
               const std::function<bool(block_id, uint32_t)>& has);

  uint64_t label(block_id id) const;
  size_t mark_count() const;
  size_t heap_bytes() const;

 private:
  void relabel();

  std::unordered_map<block_id, uint64_t> label_;
  std::map<uint64_t, block_id> order_;
  std::vector<std::map<uint64_t, block_id>> marks_;
};

}  // namespace dynwt
