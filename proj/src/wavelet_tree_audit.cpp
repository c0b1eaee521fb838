#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dynwt/errors.hpp"
#include "dynwt/wavelet_tree.hpp"

namespace dynwt {
namespace {

void check(bool ok, const std::string& what) {
  if (!ok) fail(errc::invariant, what);
}

double entropy(const std::vector<uint64_t>& counts) {
  uint64_t n = 0;
  for (uint64_t c : counts) n += c;
  if (n == 0) return 0;
  double h = 0;
  for (uint64_t c : counts)
    if (c) h += static_cast<double>(c) / n * std::log2(static_cast<double>(n) / c);
  return h;
}

}  // namespace

void wavelet_tree::audit() const {
  check(!nodes_.empty() && nodes_.begin()->first == node_key{0, 0}, "root node missing");
  const wnode& root = *nodes_.begin()->second;
  check(root.total.total() == nbar_, "root length disagrees with stored length");
  check(root.alive.total() == n_, "root alive count disagrees with length");
  check(nbar_ - n_ == del_.size(), "deleted count disagrees with DEL");

  size_t registered = 0;
  for (block_id id = 0; id < registry_.size(); ++id) {
    const reg_entry& r = registry_[id];
    if (!r.blk) continue;
    ++registered;
    check(r.pos < r.node->chain.size() && r.node->chain[r.pos].get() == r.blk && r.blk->id() == id,
          "registry entry " + std::to_string(id) + " is stale");
  }
  size_t blocks = 0;
  uint64_t leaf_dead = 0;
  uint64_t root_refs = 0;

  for (const auto& [key, vp] : nodes_) {
    const wnode& v = *vp;
    const std::string where = "node (" + std::to_string(key.depth) + "," + std::to_string(key.prefix) + ")";
    check(!v.chain.empty(), where + ": empty chain");
    check(v.internal == (key.depth < h_) && v.tracked == (key.depth == 0 || key.depth == h_),
          where + ": wrong node kind");
    blocks += v.chain.size();
    const uint32_t cap = params_.cap_symbols();
    for (size_t j = 0; j < v.chain.size(); ++j) {
      const block& b = *v.chain[j];
      b.audit();
      check(b.has_payload() == v.internal && b.tracks_alive() == v.tracked, where + ": block kind");
      check(b.size() < 2 * cap, where + ": block over capacity");
      if (v.chain.size() > 1) check(b.size() > 0, where + ": empty block in a longer chain");
      if (j + 1 < v.chain.size()) check(b.size() >= cap / 2, where + ": underfull block");
      check(b.links().owned_links() <= params_.rho + 1, where + ": too many owned links");
      if (v.tracked) {
        check(v.total.value(j + 1) == b.size(), where + ": total partial sum");
        check(v.alive.value(j + 1) == b.alive(), where + ": alive partial sum");
      }
      if (key.depth == h_) leaf_dead += b.size() - b.alive();
      if (key.depth == 0) root_refs += b.links().refs();
      if (key.depth != 0) check(b.links().refs() == 0, where + ": stray reference");
    }
    if (v.tracked) check(v.total.size() == v.chain.size(), where + ": partial sums length");

    if (v.internal) {
      check(v.sf.size() == v.chain.size(), where + ": split-find length");
      for (uint32_t t = 0; t < params_.rho; ++t) {
        std::optional<block_id> last;
        for (const auto& b : v.chain) {
          check(v.sf.marked(t, b->id()) == (b->count(t) > 0), where + ": split-find mark");
          check(v.sf.find(t, b->id()) == last, where + ": split-find answer");
          if (b->count(t)) last = b->id();
        }
      }
    }
    if (key.depth > 0) {
      const wnode* par = find_node({key.depth - 1, key.prefix / params_.rho});
      check(par != nullptr, where + ": parent missing");
    }
  }
  check(registered == blocks, "registry size disagrees with chains");
  check(root_refs == del_.size(), "root references disagree with DEL");
  check(leaf_dead == del_.size(), "leaf deletions disagree with DEL");

  // Links: every correspondence and role, checked against chain arithmetic.
  for (const auto& [key, vp] : nodes_) {
    const wnode& v = *vp;
    const std::string where = "node (" + std::to_string(key.depth) + "," + std::to_string(key.prefix) + ")";
    if (!v.internal) continue;
    for (uint32_t t = 0; t < params_.rho; ++t) {
      std::vector<uint64_t> pstart(v.chain.size() + 1, 0);
      for (size_t j = 0; j < v.chain.size(); ++j) pstart[j + 1] = pstart[j] + v.chain[j]->count(t);
      const wnode* c = find_node(child_key(key, t));
      if (pstart.back() == 0) {
        check(!c || node_size(c->key) == 0, where + ": child holds symbols absent from parent");
        continue;
      }
      check(c != nullptr, where + ": child missing");
      std::vector<uint64_t> cstart(c->chain.size() + 1, 0);
      for (size_t q = 0; q < c->chain.size(); ++q) cstart[q + 1] = cstart[q] + c->chain[q]->size();
      check(cstart.back() == pstart.back(), where + ": child size");

      for (size_t j = 0; j < v.chain.size(); ++j) {
        const block& b = *v.chain[j];
        const uint32_t first = b.count(t) ? b.select(t, 1) : 0;
        bool saw_first = false;
        for (local_id id : b.links().ends_of(link_kind::down(t))) {
          const link_end e = b.links().end(id);
          check(e.roles != 0, where + ": link without a role");
          check(b.access(e.index) == t, where + ": down link at a foreign digit");
          const reg_entry& ce = entry(e.remote.block);
          check(ce.node == c, where + ": down link leaves the child");
          const link_end back = ce.blk->links().end(e.remote.local);
          check(back.kind.is_up() && back.remote == handle{b.id(), id} && back.roles == e.roles,
                where + ": link not bidirectional");
          check(pstart[j] + b.rank(t, e.index) == cstart[ce.pos] + back.index,
                where + ": link joins non-corresponding elements");
          if (e.roles & kFirstOccurrence) check(e.index == first, where + ": misplaced first-occurrence link");
          if (e.roles & kBlockHead) check(back.index == 1, where + ": misplaced block-head link");
          if (e.index == first) saw_first = (e.roles & kFirstOccurrence) != 0;
        }
        check(first == 0 || saw_first, where + ": first occurrence without link");
      }
      for (const auto& cb : c->chain) {
        for (local_id id : cb->links().ends_of(link_kind::up())) {
          const link_end e = cb->links().end(id);
          check(entry(e.remote.block).node == &v, where + ": up link leaves the parent");
        }
        if (cb->size()) {
          const auto h = cb->links().at(1, link_kind::up());
          check(h && (h->roles & kBlockHead), where + ": block head without link");
        }
      }
    }
  }

  // DEL entries.
  std::set<std::pair<block_id, uint32_t>> seen;
  for (size_t r = 0; r < del_.size(); ++r) {
    const reg_entry& e = entry(del_[r].block);
    check(e.node == &root, "DEL entry outside the root");
    const link_end end = e.blk->links().end(del_[r].local);
    check(!e.blk->links().is_link(del_[r].local), "DEL entry is a link");
    check(end.remote == handle{kExternalBlock, static_cast<local_id>(r)}, "DEL back reference");
    check(!e.blk->is_alive(end.index), "DEL entry points at an alive symbol");
    check(seen.emplace(del_[r].block, end.index).second, "DEL lists a symbol twice");
  }

  // Alphabet against leaf counts.
  uint64_t total = 0;
  for (const auto& [key, vp] : nodes_) {
    if (key.depth != h_) continue;
    uint64_t alive = vp->alive.total();
    check(alive == alpha_.occurrences(key.prefix + 1), "leaf alive count disagrees with alphabet");
    total += alive;
  }
  check(total == n_, "alphabet occurrences disagree with length");
  for (uint64_t s : alpha_.live_slots()) {
    check(alpha_.slot_of(alpha_.symbol_of(s)) == s, "alphabet maps are not inverse");
    check(s <= alpha_.capacity(), "slot beyond capacity");
  }
}

tree_stats wavelet_tree::stats() const {
  tree_stats s;
  s.n = n_;
  s.n_stored = nbar_;
  s.sigma_eff = alpha_.live();
  s.w = params_.w;
  s.rho = params_.rho;
  s.tau = params_.tau;
  s.height = h_;
  s.cap_symbols = params_.cap_symbols();
  s.deleted = del_.size();
  s.rebuilds = rebuilds_;
  s.cleanings = cleanings_;

  std::vector<uint64_t> alive_counts, stored_counts;
  for (uint64_t slot : alpha_.live_slots()) alive_counts.push_back(alpha_.occurrences(slot));
  s.h0 = entropy(alive_counts);

  const uint64_t w = params_.w;
  for (const auto& [key, vp] : nodes_) {
    const wnode& v = *vp;
    ++s.nodes;
    if (key.depth == h_) stored_counts.push_back(v.total.total());
    for (const auto& b : v.chain) {
      ++s.blocks;
      const block_space bs = b->space();
      s.miniblocks += bs.miniblocks;
      s.chunks += bs.chunks;
      s.payload_offset_bits += bs.offset_bits;
      s.class_header_bits += bs.class_bits;
      s.counter_bits += bs.counter_bits;
      s.alive_bits += bs.alive_bits;
      s.heap_bytes += bs.heap_bytes;
      s.links += b->links().owned_links();
      s.link_ends += b->links().link_ends();
    }
    if (v.tracked) {
      s.psums_bits += 2 * v.total.size() * 2 * w;
      s.heap_bytes += v.total.heap_bytes() + v.alive.heap_bytes();
    }
    if (v.internal) {
      s.splitfind_bits += (v.sf.size() + v.sf.mark_count()) * w;
      s.heap_bytes += v.sf.heap_bytes();
    }
  }
  s.h0_stored = entropy(stored_counts);
  // A link end stores its index, kind, local id and the remote handle.
  const uint64_t id_bits = ceil_log2(uint64_t{2} * s.cap_symbols + 1);
  s.link_bits = s.link_ends * (2 * id_bits + ceil_log2(params_.rho + 1) + w);
  s.del_bits = del_.size() * 2 * w;
  s.alphabet_bits = s.sigma_eff * (64 + 2 * w);
  s.heap_bytes += alpha_.heap_bytes() + registry_.capacity() * sizeof(reg_entry);
  s.total_bits = s.payload_offset_bits + s.class_header_bits + s.counter_bits + s.alive_bits +
                 s.link_bits + s.psums_bits + s.splitfind_bits + s.del_bits + s.alphabet_bits;
  return s;
}

}  // namespace dynwt
