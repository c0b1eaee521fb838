#pragma once

// Inter-node links. Every link joins an element of a parent node with the
// corresponding element (same encoded symbol) of one of its children. Each
// end lives in the link table of its block, is addressed from the other
// end through a stable handle (block id, local id), and is kept positioned
// as the block is edited, split and merged.

#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace dynwt {

using block_id = uint32_t;
using local_id = uint32_t;

inline constexpr block_id kNoBlock = 0xffffffffu;
/// Pseudo block for one-way references held outside the tree (DEL list).
inline constexpr block_id kExternalBlock = 0xfffffffeu;

struct handle {
  block_id block = kNoBlock;
  local_id local = 0;

  bool operator==(const handle&) const = default;
};

/// Direction of a link seen from one of its ends: Up points to the parent
/// node, Down(t) to child t.
class link_kind {
 public:
  static link_kind up() { return link_kind(0); }
  static link_kind down(uint32_t t) { return link_kind(t + 1); }
  static link_kind from_code(uint32_t code) { return link_kind(code); }

  bool is_up() const { return code_ == 0; }
  uint32_t digit() const { return code_ - 1; }
  uint32_t code() const { return code_; }
  bool operator==(const link_kind&) const = default;

 private:
  explicit link_kind(uint32_t code) : code_(code) {}
  uint32_t code_;
};

/// Why a link exists. A link may serve both invariants at once.
enum link_role : uint8_t {
  kFirstOccurrence = 1,  // parent end is the first occurrence of t in its block
  kBlockHead = 2,        // child end is the first element of its block
};

struct link_end {
  uint32_t index = 0;  // current 1-based position in the block
  link_kind kind = link_kind::up();
  handle remote;
  local_id local = 0;
  uint8_t roles = 0;
};

/// Position moves produced by splits and merges: anchor `from` now lives at
/// `to`.
struct relocation {
  handle from;
  handle to;
};

class link_table {
 public:
  explicit link_table(uint32_t rho = 2);

  uint32_t arity() const { return rho_; }

  /// Anchors a link end at `index`; returns its local id (smallest unused).
  local_id attach_link(uint32_t index, link_kind kind, handle remote, uint8_t roles);
  /// Anchors a plain handle (no link entry) whose referrer is `remote`.
  local_id attach_ref(uint32_t index, handle remote);
  void detach(local_id id);

  bool live(local_id id) const;
  uint32_t index_of(local_id id) const;
  link_end end(local_id id) const;
  bool is_link(local_id id) const;
  void set_remote(local_id id, handle remote);
  void set_roles(local_id id, uint8_t roles);

  /// Greatest anchor of `kind` at an index <= i.
  std::optional<link_end> last_at_or_before(uint32_t i, link_kind kind) const;
  /// Anchor of `kind` exactly at index i.
  std::optional<link_end> at(uint32_t i, link_kind kind) const;
  /// Every live anchor (links and plain references) at index i.
  std::vector<local_id> anchors_at(uint32_t i) const;

  /// Keeps positions current across a symbol insertion before index i.
  void shift_on_insert(uint32_t i);
  /// Keeps positions current across removal of index i, which must carry
  /// no anchor.
  void shift_on_erase(uint32_t i);

  /// Moves anchors with index > m into `right` (renumbered from 1).
  std::vector<std::pair<local_id, local_id>> split_off(uint32_t m, link_table& right);
  /// Appends all anchors of `right`, shifted by `offset`.
  std::vector<std::pair<local_id, local_id>> absorb(link_table& right, uint32_t offset);

  /// Links with this end in role of owner: Down ends of first-occurrence
  /// links plus Up ends of block-head links.
  size_t owned_links() const;
  size_t link_ends() const;
  size_t refs() const;
  /// Every live anchor id.
  std::vector<local_id> live_ids() const;
  /// Ids of the link ends of one kind, ordered by index.
  const std::vector<local_id>& ends_of(link_kind kind) const { return by_kind_[kind.code()]; }

  size_t heap_bytes() const;

 private:
  struct slot {
    uint32_t index = 0;  // 0 marks a free slot
    uint32_t kind = 0;
    handle remote;
    uint8_t roles = 0;
    bool link = false;
  };

  local_id allocate();
  void insert_sorted(local_id id);
  void erase_sorted(local_id id);
  const slot& get(local_id id) const;

  uint32_t rho_;
  std::vector<slot> slots_;
  std::priority_queue<local_id, std::vector<local_id>, std::greater<>> free_;
  std::vector<std::vector<local_id>> by_kind_;
  size_t live_ = 0;
};

/// Lookup service over all tables of a structure.
class link_directory {
 public:
  virtual ~link_directory() = default;
  virtual link_table& table(block_id id) = 0;
  /// An external referrer's target moved.
  virtual void retarget_external(local_id ref, handle now) = 0;
};

/// Installs a bidirectional link between (src_block, src_index), seen from
/// there as `src_kind`, and (dst_block, dst_index). Returns the handles of
/// the src end and the dst end.
std::pair<handle, handle> register_link(link_directory& dir, block_id src_block,
                                        uint32_t src_index, link_kind src_kind,
                                        block_id dst_block, uint32_t dst_index,
                                        uint8_t roles);

/// Removes both ends of the link that has an end at `h`.
void unregister_link(link_directory& dir, handle h);

/// Current index of the element anchored at `h`.
uint32_t resolve(link_directory& dir, handle h);

/// Rewrites remote ends after anchors moved from one block to another.
void retarget(link_directory& dir, const link_table& to, block_id to_block,
              const std::vector<std::pair<local_id, local_id>>& moves);

/// Splits `old`'s anchors at m into `right` and fixes the remote ends.
void relocate_on_split(link_directory& dir, block_id old_id, link_table& old,
                       block_id right_id, link_table& right, uint32_t m);

/// Merges `right`'s anchors into `left` after `offset` elements.
void relocate_on_merge(link_directory& dir, block_id left_id, link_table& left,
                       block_id right_id, link_table& right, uint32_t offset);

}  // namespace dynwt
