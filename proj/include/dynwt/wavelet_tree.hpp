#pragma once

// Dynamic compressed sequence over an integer alphabet: a rho-ary wavelet
// tree whose nodes hold chains of compressed blocks, joined by inter-node
// links. Deletions are lazy: deleted symbols stay in place, are recorded in
// a list of handles, and are expunged in batches.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dynwt/alphabet.hpp"
#include "dynwt/block.hpp"
#include "dynwt/linkmesh.hpp"
#include "dynwt/ordersf.hpp"
#include "dynwt/params.hpp"
#include "dynwt/psums.hpp"

namespace dynwt {

struct tree_config {
  uint64_t sigma = 0;  // symbols lie in [0, sigma); 0 admits every 64-bit value
  uint32_t min_w = 8;
  rational epsilon{1, 2};
  rational delta{2, 5};
  uint32_t cap_bits = 0;   // 0 keeps the default w^3
  uint32_t mini_bits = 0;  // 0 keeps the default 16w

  bool operator==(const tree_config&) const = default;
};

struct node_key {
  uint32_t depth = 0;
  uint64_t prefix = 0;

  auto operator<=>(const node_key&) const = default;
};

struct position {
  block_id block = kNoBlock;
  uint32_t index = 0;

  bool operator==(const position&) const = default;
};

struct tree_stats {
  uint64_t n = 0;
  uint64_t n_stored = 0;
  uint64_t sigma_eff = 0;
  uint32_t w = 0;
  uint32_t rho = 0;
  uint32_t tau = 0;
  uint32_t height = 0;
  uint32_t cap_symbols = 0;
  double h0 = 0;         // H0(S) in bits per symbol
  double h0_stored = 0;  // H0 of the stored sequence, dead symbols included
  uint64_t nodes = 0;
  uint64_t blocks = 0;
  uint64_t miniblocks = 0;
  uint64_t chunks = 0;
  uint64_t links = 0;
  uint64_t link_ends = 0;
  uint64_t deleted = 0;
  uint64_t payload_offset_bits = 0;
  uint64_t class_header_bits = 0;
  uint64_t counter_bits = 0;
  uint64_t alive_bits = 0;
  uint64_t link_bits = 0;
  uint64_t psums_bits = 0;
  uint64_t splitfind_bits = 0;
  uint64_t del_bits = 0;
  uint64_t alphabet_bits = 0;
  uint64_t total_bits = 0;
  uint64_t heap_bytes = 0;
  uint64_t rebuilds = 0;
  uint64_t cleanings = 0;
};

class wavelet_tree : private link_directory {
 public:
  explicit wavelet_tree(tree_config cfg = {});
  ~wavelet_tree() override;
  wavelet_tree(wavelet_tree&&) noexcept;
  wavelet_tree& operator=(wavelet_tree&&) noexcept;

  /// Same content as inserting `symbols` left to right into an empty tree.
  static wavelet_tree build_from(std::span<const uint64_t> symbols, tree_config cfg = {});

  const tree_config& config() const { return cfg_; }
  const block_params& params() const { return params_; }
  uint64_t size() const { return n_; }
  /// Stored length, dead symbols included.
  uint64_t stored_size() const { return nbar_; }
  uint64_t deleted() const { return del_.size(); }
  uint32_t height() const { return h_; }
  const alphabet_map& alphabet() const { return alpha_; }
  uint64_t rebuilds() const { return rebuilds_; }
  uint64_t cleanings() const { return cleanings_; }

  uint64_t access(uint64_t i) const;
  uint64_t rank(uint64_t a, uint64_t i) const;
  uint64_t select(uint64_t a, uint64_t k) const;
  void insert(uint64_t i, uint64_t a);
  void erase(uint64_t i);
  /// Expunges every deleted symbol.
  void clean();

  std::vector<uint64_t> to_vector() const;

  // Navigation surface, exposed for verification.
  position root_position(uint64_t i) const;
  position descend(position p, uint32_t t) const;
  position ascend(position p) const;
  node_key node_of(position p) const;
  uint32_t digit_at(position p) const;
  bool is_alive(position p) const;
  /// 1-based index of p within its node's whole chain.
  uint64_t chain_index(position p) const;
  std::vector<node_key> nodes() const;
  /// Concatenated digits of an internal node's chain.
  std::vector<uint8_t> node_digits(node_key v) const;
  uint64_t node_size(node_key v) const;
  /// Stored sequence as slots, merged bottom-up from the node chains.
  std::vector<uint64_t> reconstruct() const;
  /// Digits of a slot, most significant first.
  std::vector<uint8_t> slot_digits(uint64_t slot) const;

  /// Full structural check; throws dynwt::error on the first violation.
  void audit() const;
  tree_stats stats() const;

  /// Called with before=true right before a cleaning pass and with
  /// before=false right after it.
  void set_clean_hook(std::function<void(const wavelet_tree&, bool before)> hook) {
    clean_hook_ = std::move(hook);
  }

  void save(std::ostream& out) const;
  static wavelet_tree load(std::istream& in);

 private:
  static wavelet_tree load_body(std::istream& in);

  struct wnode {
    node_key key;
    bool internal = true;
    bool tracked = false;  // root or leaf
    std::vector<std::unique_ptr<block>> chain;
    split_find sf;
    partial_sums total;
    partial_sums alive;
  };
  struct reg_entry {
    block* blk = nullptr;
    wnode* node = nullptr;
    uint32_t pos = 0;
  };

  // link_directory
  link_table& table(block_id id) override;
  void retarget_external(local_id ref, handle now) override;

  void setup(uint32_t w);
  wnode& node_at(node_key k);
  const wnode* find_node(node_key k) const;
  wnode& make_node(node_key k, bool with_block = true);
  node_key child_key(node_key k, uint32_t t) const { return {k.depth + 1, k.prefix * params_.rho + t}; }
  block& blk(block_id id) const;
  const reg_entry& entry(block_id id) const;
  block_id adopt(wnode& v, uint32_t pos, std::unique_ptr<block> b);
  void renumber(wnode& v, uint32_t from);
  void drop_block(wnode& v, uint32_t pos);

  /// Last element with digit t at or before p in v's chain; `rank_out`
  /// receives its rank of t within its block.
  std::optional<position> last_at_or_before(const wnode& v, position p, uint32_t t,
                                            uint32_t* rank_out = nullptr) const;
  position descend(position p, uint32_t t, uint32_t rank_at_p) const;
  void drop_role(position p, link_kind kind, uint8_t role);
  void add_role(position parent, uint32_t t, position child, uint8_t role);

  void split_block(wnode& v, uint32_t pos);
  void merge_blocks(wnode& v, uint32_t pos);
  void settle(wnode& v, block_id id);
  void clean_one(size_t r);
  void maybe_rebuild();
  void rebuild(uint32_t w);

  void assemble(std::vector<uint64_t> slots, std::vector<bool> alive);
  void build_node(node_key k, std::vector<uint64_t> slots, std::vector<bool> alive);
  void link_all();
  std::vector<bool> root_alive() const;

  uint32_t w_for(uint64_t n) const;
  uint64_t slot_capacity(uint32_t w) const;

  tree_config cfg_;
  block_params params_;
  uint32_t h_ = 1;
  uint64_t n_ = 0;
  uint64_t nbar_ = 0;
  alphabet_map alpha_;
  std::map<node_key, std::unique_ptr<wnode>> nodes_;
  std::vector<reg_entry> registry_;
  std::vector<block_id> free_ids_;
  std::vector<handle> del_;
  uint64_t rebuilds_ = 0;
  uint64_t cleanings_ = 0;
  std::function<void(const wavelet_tree&, bool)> clean_hook_;
};

}  // namespace dynwt
