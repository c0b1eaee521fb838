#pragma once

// One block of a node's block chain. Symbols are digits in [0, rho) held in
// miniblocks; each miniblock is a packed stream of class/offset chunks. An
// implicit tau-ary counting tree over the miniblocks keeps, per subtree, the
// symbol count, per-digit counts and (optionally) the alive count.
//
// A block built without payload stores no digits at all, only lengths and
// the alive mask. Wavelet-tree leaves use this form.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dynwt/bit_string.hpp"
#include "dynwt/linkmesh.hpp"
#include "dynwt/params.hpp"

namespace dynwt {

struct block_space {
  uint64_t chunks = 0;
  uint64_t offset_bits = 0;
  uint64_t class_bits = 0;
  uint64_t counter_bits = 0;  // counting-tree counters
  uint64_t alive_bits = 0;
  uint64_t miniblocks = 0;
  uint64_t heap_bytes = 0;
};

/// Raw miniblock image, used by serialization.
struct miniblock_image {
  uint32_t len = 0;
  bit_string chunks;
  bit_string live;
};

class block {
 public:
  block(const block_params& p, bool payload, bool track_alive);

  /// Bulk construction. `alive` may be null (all alive).
  static std::unique_ptr<block> build(const block_params& p, bool payload, bool track_alive,
                                      std::span<const uint8_t> digits,
                                      const std::vector<bool>* alive = nullptr);
  /// Count-only bulk construction.
  static std::unique_ptr<block> build_counts(const block_params& p, bool track_alive,
                                             uint32_t len, const std::vector<bool>* alive = nullptr);
  static std::unique_ptr<block> from_images(const block_params& p, bool payload, bool track_alive,
                                            std::vector<miniblock_image> images);

  block(const block&) = delete;
  block& operator=(const block&) = delete;

  block_id id() const { return id_; }
  void set_id(block_id id) { id_ = id; }

  bool has_payload() const { return payload_; }
  bool tracks_alive() const { return track_; }
  uint32_t arity() const { return rho_; }
  uint32_t size() const { return top_len(); }
  uint32_t alive() const;
  /// Occurrences of t in the whole block.
  uint32_t count(uint32_t t) const;
  /// Hard limit: inserts are refused at this length.
  uint32_t hard_capacity() const { return 2 * cap_; }
  uint32_t capacity() const { return cap_; }

  uint8_t access(uint32_t i) const;
  uint32_t rank(uint32_t t, uint32_t i) const;
  uint32_t select(uint32_t t, uint32_t k) const;
  bool is_alive(uint32_t i) const;
  uint32_t alive_rank(uint32_t i) const;
  uint32_t alive_select(uint32_t k) const;

  /// Inserts t before position i; the new element is alive.
  void insert(uint32_t i, uint8_t t);
  void erase(uint32_t i);
  void mark_deleted(uint32_t i);

  /// Keeps positions 1..m, returns a block holding m+1..len. Link anchors
  /// are not touched.
  std::unique_ptr<block> split(uint32_t m);
  /// Appends the content of `right`, leaving it empty. Link anchors are not
  /// touched.
  void append(block& right);

  std::vector<uint8_t> digits() const;
  std::vector<bool> alive_mask() const;

  link_table& links() { return links_; }
  const link_table& links() const { return links_; }

  /// Recomputes every counter from the miniblocks and checks the layout
  /// invariants; throws on the first violation.
  void audit() const;
  block_space space() const;
  std::vector<miniblock_image> images() const;
  uint32_t miniblock_count() const { return static_cast<uint32_t>(minis_.size()); }

 private:
  struct mini {
    uint32_t len = 0;
    bit_string bits;
    bit_string live;
  };
  struct cursor {
    size_t bit = 0;
    uint32_t start = 0;  // symbols before this chunk
    uint32_t len = 0;
    uint32_t width = 0;
    uint64_t counts = 0;  // packed class counters
  };
  struct locus {
    uint32_t mini;
    uint32_t pos;  // 1-based within the miniblock
  };

  uint32_t header_bits() const { return rho_ * ccb_; }
  uint32_t class_count(uint64_t packed, uint32_t t) const {
    return static_cast<uint32_t>((packed >> (t * ccb_)) & ((uint64_t{1} << ccb_) - 1));
  }
  cursor read_cursor(const mini& m, size_t bit, uint32_t start) const;
  std::vector<cursor> cursors(const mini& m) const;
  void cursors_into(const mini& m, std::vector<cursor>& out) const;
  void decode(const mini& m, const cursor& c, uint8_t* out) const;
  void encode_run(std::span<const uint8_t> run, bit_string& out) const;
  std::vector<uint8_t> mini_digits(const mini& m) const;
  void fill_mini(mini& m, std::span<const uint8_t> run) const;

  uint32_t top_len() const { return lens_.back()[0]; }
  locus locate(uint32_t i) const;
  void bump(uint32_t k, uint8_t t, int dlen, int dalive);
  void rebuild_levels();
  void rebuild_from(std::span<const uint8_t> digits, const std::vector<bool>& alive);
  void edit(mini& m, uint32_t pos, bool insert, uint8_t t);
  void split_mini(uint32_t k);
  void merge_mini(uint32_t k);
  void set_leaf_counts(uint32_t k);

  uint32_t rho_;
  uint32_t tau_;
  uint32_t bmax_;
  uint32_t ccb_;
  uint32_t mini_len_;
  uint32_t cap_;
  bool payload_;
  bool track_;
  block_id id_ = kNoBlock;
  block_params params_;
  const std::vector<uint16_t>* shapes_ = nullptr;  // shared class shape table

  std::vector<mini> minis_;
  // Level 0 holds one entry per miniblock; the last level holds the root.
  std::vector<std::vector<uint32_t>> lens_;
  std::vector<std::vector<uint32_t>> alives_;
  std::vector<std::vector<uint32_t>> cnts_;  // node * rho_ + t
  link_table links_;
};

}  // namespace dynwt
