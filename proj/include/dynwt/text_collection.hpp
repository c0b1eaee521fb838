#pragma once

// Dynamic document collection kept as the BWT of its documents, each closed
// by a terminator. Terminators share one symbol and sort by document order.
// Supports pattern counting by backward search and substring extraction by
// LF-walking.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dynwt/wavelet_tree.hpp"

namespace dynwt {

class text_collection {
 public:
  static constexpr uint64_t kTerminator = 0;
  static constexpr uint64_t kSigma = 257;  // terminator plus 256 bytes

  explicit text_collection(tree_config cfg = default_config());
  static tree_config default_config();

  /// Adds a nonempty document; returns its id.
  uint64_t insert(std::string_view doc);
  void erase(uint64_t id);

  /// Occurrences of a nonempty pattern across all documents.
  uint64_t count(std::string_view pattern) const;
  /// Bytes l..r (1-based, inclusive) of a document.
  std::string extract(uint64_t id, uint64_t l, uint64_t r) const;
  std::string document(uint64_t id) const;
  uint64_t length(uint64_t id) const;
  /// Live ids in collection order.
  std::vector<uint64_t> documents() const;

  /// Rows of the BWT, terminators included.
  uint64_t rows() const { return seq_.size(); }
  const wavelet_tree& sequence() const { return seq_; }
  /// The BWT with terminators rendered as '$'.
  std::string bwt() const;
  /// LF(p) for a row p.
  uint64_t lf(uint64_t p) const;

  /// Tree audit plus symbol counts; with `full`, also checks that LF is a
  /// permutation.
  void audit(bool full = true) const;

  void save(std::ostream& out) const;
  static text_collection load(std::istream& in);

  /// Called after every prepended character while a document goes in, with
  /// the start of the inserted suffix (1-based) and the row holding its
  /// pending terminator.
  using step_hook = std::function<void(const text_collection&, uint64_t start, uint64_t row)>;
  void set_step_hook(step_hook h) { hook_ = std::move(h); }

 private:
  struct doc {
    uint64_t id;
    uint64_t len;
  };

  /// Symbols strictly smaller than a, over the whole sequence.
  uint64_t smaller(uint64_t a) const;
  void bump(uint64_t a, int64_t d);
  size_t order_of(uint64_t id) const;
  void add_symbol(uint64_t row, uint64_t a);

  wavelet_tree seq_;
  std::vector<int64_t> fenwick_;  // symbol counts, 1-based over symbol+1
  std::vector<doc> docs_;
  uint64_t next_id_ = 0;
  step_hook hook_;
};

/// BWT of text followed by a terminator smaller than every byte, rendered
/// as '$'. `on_step` sees each intermediate state as in
/// text_collection::set_step_hook.
std::string bwt_build(std::string_view text, text_collection::step_hook on_step = {});

}  // namespace dynwt
