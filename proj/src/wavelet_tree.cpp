#include "dynwt/wavelet_tree.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "dynwt/errors.hpp"

namespace dynwt {

wavelet_tree::wavelet_tree(tree_config cfg) : cfg_(cfg) { setup(std::max<uint32_t>(cfg_.min_w, 2)); }

wavelet_tree::~wavelet_tree() = default;
wavelet_tree::wavelet_tree(wavelet_tree&&) noexcept = default;
wavelet_tree& wavelet_tree::operator=(wavelet_tree&&) noexcept = default;

uint64_t wavelet_tree::slot_capacity(uint32_t w) const {
  const uint64_t full = uint64_t{1} << w;
  return cfg_.sigma ? std::min(full, cfg_.sigma) : full;
}

uint32_t wavelet_tree::w_for(uint64_t n) const {
  return std::max<uint32_t>(cfg_.min_w, static_cast<uint32_t>(std::bit_width(n)));
}

void wavelet_tree::setup(uint32_t w) {
  if (w > 40) fail(errc::unsupported, "sequence too long");
  params_ = block_params::for_word(w, cfg_.epsilon, cfg_.delta, cfg_.cap_bits, cfg_.mini_bits);
  const uint64_t s = slot_capacity(w);
  h_ = 0;
  for (unsigned __int128 reach = 1; reach < s; reach *= params_.rho) ++h_;
  h_ = std::max<uint32_t>(h_, 1);
  n_ = nbar_ = 0;
  alpha_ = alphabet_map(s);
  nodes_.clear();
  registry_.clear();
  free_ids_.clear();
  del_.clear();
  make_node({0, 0});
}

// ---- registry ----------------------------------------------------------

link_table& wavelet_tree::table(block_id id) { return blk(id).links(); }

void wavelet_tree::retarget_external(local_id ref, handle now) { del_.at(ref) = now; }

const wavelet_tree::reg_entry& wavelet_tree::entry(block_id id) const {
  if (id >= registry_.size() || !registry_[id].blk)
    fail(errc::unknown_block, "block " + std::to_string(id) + " is not registered");
  return registry_[id];
}

block& wavelet_tree::blk(block_id id) const { return *entry(id).blk; }

const wavelet_tree::wnode* wavelet_tree::find_node(node_key k) const {
  auto it = nodes_.find(k);
  return it == nodes_.end() ? nullptr : it->second.get();
}

wavelet_tree::wnode& wavelet_tree::make_node(node_key k, bool with_block) {
  auto v = std::make_unique<wnode>();
  v->key = k;
  v->internal = k.depth < h_;
  v->tracked = k.depth == 0 || k.depth == h_;
  v->sf = split_find(params_.rho);
  wnode& ref = *v;
  nodes_.emplace(k, std::move(v));
  if (with_block) adopt(ref, 0, std::make_unique<block>(params_, ref.internal, ref.tracked));
  return ref;
}

wavelet_tree::wnode& wavelet_tree::node_at(node_key k) {
  auto it = nodes_.find(k);
  if (it != nodes_.end()) return *it->second;
  return make_node(k);
}

void wavelet_tree::renumber(wnode& v, uint32_t from) {
  for (uint32_t j = from; j < v.chain.size(); ++j) registry_[v.chain[j]->id()].pos = j;
}

block_id wavelet_tree::adopt(wnode& v, uint32_t pos, std::unique_ptr<block> b) {
  block_id id;
  if (!free_ids_.empty()) {
    id = free_ids_.back();
    free_ids_.pop_back();
  } else {
    id = static_cast<block_id>(registry_.size());
    if (id >= kExternalBlock) fail(errc::overflow, "block ids exhausted");
    registry_.emplace_back();
  }
  b->set_id(id);
  block* raw = b.get();
  v.chain.insert(v.chain.begin() + pos, std::move(b));
  registry_[id] = {raw, &v, pos};
  renumber(v, pos + 1);
  if (v.tracked) {
    v.total.insert(pos + 1, raw->size());
    v.alive.insert(pos + 1, raw->alive());
  }
  if (v.internal) {
    v.sf.insert_block(pos ? v.chain[pos - 1]->id() : kNoBlock, id);
    for (uint32_t t = 0; t < params_.rho; ++t)
      if (raw->count(t)) v.sf.mark(t, id);
  }
  return id;
}

void wavelet_tree::drop_block(wnode& v, uint32_t pos) {
  block& b = *v.chain[pos];
  if (!b.links().live_ids().empty()) fail(errc::dangling_handle, "dropping an anchored block");
  if (v.tracked) {
    if (const uint64_t tv = v.total.value(pos + 1)) v.total.add(pos + 1, -static_cast<int64_t>(tv));
    if (const uint64_t av = v.alive.value(pos + 1)) v.alive.add(pos + 1, -static_cast<int64_t>(av));
    v.total.remove(pos + 1);
    v.alive.remove(pos + 1);
  }
  if (v.internal) v.sf.erase_block(b.id());
  registry_[b.id()] = {};
  free_ids_.push_back(b.id());
  v.chain.erase(v.chain.begin() + pos);
  renumber(v, pos);
}

// ---- navigation --------------------------------------------------------

position wavelet_tree::root_position(uint64_t i) const {
  if (i == 0 || i > n_) fail(errc::out_of_range, "position " + std::to_string(i));
  const wnode& root = *nodes_.begin()->second;
  const auto [j, k] = root.alive.search(i);
  const block& b = *root.chain[j - 1];
  return {b.id(), b.alive_select(static_cast<uint32_t>(k))};
}

position wavelet_tree::descend(position p, uint32_t t) const {
  return descend(p, t, blk(p.block).rank(t, p.index));
}

position wavelet_tree::descend(position p, uint32_t t, uint32_t rank_at_p) const {
  const block& b = blk(p.block);
  const auto e = b.links().last_at_or_before(p.index, link_kind::down(t));
  if (!e) fail(errc::not_found, "no link toward child " + std::to_string(t));
  const block& c = blk(e->remote.block);
  const uint32_t y = c.links().index_of(e->remote.local);
  return {c.id(), y + rank_at_p - b.rank(t, e->index)};
}

position wavelet_tree::ascend(position p) const {
  const reg_entry& r = entry(p.block);
  if (r.node->key.depth == 0) fail(errc::not_found, "the root has no parent");
  const block& c = *r.blk;
  const auto e = c.links().last_at_or_before(p.index, link_kind::up());
  if (!e) fail(errc::not_found, "no link toward the parent");
  const block& par = blk(e->remote.block);
  const uint32_t z = par.links().index_of(e->remote.local);
  const uint32_t t = static_cast<uint32_t>(r.node->key.prefix % params_.rho);
  return {par.id(), par.select(t, par.rank(t, z) + (p.index - e->index))};
}

node_key wavelet_tree::node_of(position p) const { return entry(p.block).node->key; }

uint32_t wavelet_tree::digit_at(position p) const { return blk(p.block).access(p.index); }

bool wavelet_tree::is_alive(position p) const { return blk(p.block).is_alive(p.index); }

uint64_t wavelet_tree::chain_index(position p) const {
  const reg_entry& r = entry(p.block);
  uint64_t before = 0;
  for (uint32_t j = 0; j < r.pos; ++j) before += r.node->chain[j]->size();
  return before + p.index;
}

std::vector<uint8_t> wavelet_tree::slot_digits(uint64_t slot) const {
  std::vector<uint8_t> d(h_);
  uint64_t m = slot - 1;
  for (uint32_t k = h_; k-- > 0;) {
    d[k] = static_cast<uint8_t>(m % params_.rho);
    m /= params_.rho;
  }
  return d;
}

std::optional<position> wavelet_tree::last_at_or_before(const wnode& v, position p, uint32_t t,
                                                        uint32_t* rank_out) const {
  const block& b = blk(p.block);
  if (p.index > 0) {
    const uint32_t r = b.rank(t, p.index);
    if (rank_out) *rank_out = r;
    if (r > 0) return position{b.id(), b.select(t, r)};
  }
  const auto prev = v.sf.find(t, b.id());
  if (!prev) return std::nullopt;
  const block& pb = blk(*prev);
  if (rank_out) *rank_out = pb.count(t);
  return position{pb.id(), pb.select(t, pb.count(t))};
}

// ---- queries -----------------------------------------------------------

uint64_t wavelet_tree::access(uint64_t i) const {
  position p = root_position(i);
  uint64_t m = 0;
  for (uint32_t k = 0; k < h_; ++k) {
    const uint32_t t = blk(p.block).access(p.index);
    m = m * params_.rho + t;
    if (k + 1 < h_) p = descend(p, t);
  }
  return alpha_.symbol_of(m + 1);
}

uint64_t wavelet_tree::rank(uint64_t a, uint64_t i) const {
  if (i > n_) fail(errc::out_of_range, "rank prefix " + std::to_string(i));
  const auto slot = alpha_.slot_of(a);
  if (i == 0 || !slot || alpha_.occurrences(*slot) == 0) return 0;
  const auto digs = slot_digits(*slot);
  position p = root_position(i);
  for (uint32_t k = 0; k < h_; ++k) {
    const wnode& v = *entry(p.block).node;
    uint32_t r = 0;
    const auto q = last_at_or_before(v, p, digs[k], &r);
    if (!q) return 0;
    p = descend(*q, digs[k], r);
  }
  const reg_entry& leaf = entry(p.block);
  return leaf.node->alive.sum(leaf.pos) + leaf.blk->alive_rank(p.index);
}

uint64_t wavelet_tree::select(uint64_t a, uint64_t k) const {
  const auto slot = alpha_.slot_of(a);
  if (!slot || k == 0 || k > alpha_.occurrences(*slot))
    fail(errc::not_found, "occurrence " + std::to_string(k) + " of symbol " + std::to_string(a));
  const wnode* leaf = find_node({h_, *slot - 1});
  if (!leaf) fail(errc::invariant, "leaf of a live symbol is missing");
  const auto [j, r] = leaf->alive.search(k);
  const block& l = *leaf->chain[j - 1];
  position p{l.id(), l.alive_select(static_cast<uint32_t>(r))};
  for (uint32_t d = 0; d < h_; ++d) p = ascend(p);
  const reg_entry& root = entry(p.block);
  return root.node->alive.sum(root.pos) + root.blk->alive_rank(p.index);
}

// ---- link roles --------------------------------------------------------

void wavelet_tree::drop_role(position p, link_kind kind, uint8_t role) {
  link_table& tab = blk(p.block).links();
  const auto e = tab.at(p.index, kind);
  if (!e || !(e->roles & role)) fail(errc::invariant, "expected link role is missing");
  const uint8_t roles = e->roles & ~role;
  if (roles == 0) {
    unregister_link(*this, {p.block, e->local});
  } else {
    tab.set_roles(e->local, roles);
    table(e->remote.block).set_roles(e->remote.local, roles);
  }
}

void wavelet_tree::add_role(position parent, uint32_t t, position child, uint8_t role) {
  link_table& tab = blk(parent.block).links();
  if (const auto e = tab.at(parent.index, link_kind::down(t))) {
    if (e->remote.block != child.block || table(child.block).index_of(e->remote.local) != child.index)
      fail(errc::invariant, "existing link disagrees with the expected correspondence");
    tab.set_roles(e->local, e->roles | role);
    table(child.block).set_roles(e->remote.local, e->roles | role);
    return;
  }
  register_link(*this, parent.block, parent.index, link_kind::down(t), child.block, child.index, role);
}

// ---- updates -----------------------------------------------------------

void wavelet_tree::insert(uint64_t i, uint64_t a) {
  if (i == 0 || i > n_ + 1) fail(errc::out_of_range, "insert position " + std::to_string(i));
  if (cfg_.sigma && a >= cfg_.sigma) fail(errc::out_of_range, "symbol outside the alphabet");
  const uint64_t slot = alpha_.acquire(a);
  const auto digs = slot_digits(slot);

  std::vector<wnode*> path(h_ + 1);
  std::vector<position> pts(h_ + 1);
  path[0] = nodes_.begin()->second.get();
  if (i <= n_) {
    pts[0] = root_position(i);
  } else {
    const block& last = *path[0]->chain.back();
    pts[0] = {last.id(), last.size() + 1};
  }
  for (uint32_t k = 0; k < h_; ++k) {
    const uint32_t t = digs[k];
    path[k + 1] = &node_at(child_key(path[k]->key, t));
    uint32_t r = 0;
    const auto prev = last_at_or_before(*path[k], {pts[k].block, pts[k].index - 1}, t, &r);
    if (prev) {
      const position c = descend(*prev, t, r);
      pts[k + 1] = {c.block, c.index + 1};
    } else {
      pts[k + 1] = {path[k + 1]->chain.front()->id(), 1};
    }
  }

  for (uint32_t k = 0; k <= h_; ++k) {
    wnode& v = *path[k];
    const reg_entry& r = entry(pts[k].block);
    r.blk->insert(pts[k].index, k < h_ ? digs[k] : 0);
    if (v.tracked) {
      v.total.add(r.pos + 1, 1);
      v.alive.add(r.pos + 1, 1);
    }
    if (v.internal) v.sf.mark(digs[k], pts[k].block);
  }

  for (uint32_t k = 0; k < h_; ++k) {
    const block& b = blk(pts[k].block);
    const block& c = blk(pts[k + 1].block);
    const uint32_t t = digs[k];
    uint8_t roles = 0;
    if (b.rank(t, pts[k].index) == 1) {
      if (b.count(t) > 1) drop_role({b.id(), b.select(t, 2)}, link_kind::down(t), kFirstOccurrence);
      roles |= kFirstOccurrence;
    }
    if (pts[k + 1].index == 1) {
      if (c.size() > 1) drop_role({c.id(), 2}, link_kind::up(), kBlockHead);
      roles |= kBlockHead;
    }
    if (roles)
      register_link(*this, b.id(), pts[k].index, link_kind::down(t), c.id(), pts[k + 1].index, roles);
  }

  ++n_;
  ++nbar_;
  for (uint32_t k = 0; k <= h_; ++k) settle(*path[k], pts[k].block);
  maybe_rebuild();
}

void wavelet_tree::settle(wnode& v, block_id id) {
  const uint32_t pos = entry(id).pos;
  const block& b = *v.chain[pos];
  if (b.size() >= b.hard_capacity()) {
    split_block(v, pos);
  } else if (pos + 1 < v.chain.size()) {
    if (b.size() < b.capacity() / 2) merge_blocks(v, pos);
  } else if (b.size() == 0 && v.chain.size() > 1) {
    drop_block(v, pos);
  }
}

void wavelet_tree::split_block(wnode& v, uint32_t pos) {
  block& b = *v.chain[pos];
  const block_id id = b.id();
  const uint32_t m = b.size() / 2;

  std::optional<position> head_parent;
  if (v.key.depth > 0) head_parent = ascend({id, m + 1});
  struct first_occ {
    uint32_t t;
    uint32_t index;
    position child;
  };
  std::vector<first_occ> firsts;
  if (v.internal) {
    for (uint32_t t = 0; t < params_.rho; ++t) {
      const uint32_t r = b.rank(t, m);
      if (r > 0 && b.count(t) > r) {
        const uint32_t f = b.select(t, r + 1);
        firsts.push_back({t, f - m, descend({id, f}, t)});
      }
    }
  }

  auto right = b.split(m);
  if (v.tracked) {
    v.total.add(pos + 1, -static_cast<int64_t>(right->size()));
    v.alive.add(pos + 1, -static_cast<int64_t>(right->alive()));
  }
  const block_id rid = adopt(v, pos + 1, std::move(right));
  relocate_on_split(*this, id, b.links(), rid, blk(rid).links(), m);
  if (v.internal)
    for (uint32_t t = 0; t < params_.rho; ++t)
      if (b.count(t) == 0) v.sf.unmark(t, id);

  if (head_parent)
    add_role(*head_parent, static_cast<uint32_t>(v.key.prefix % params_.rho), {rid, 1}, kBlockHead);
  for (const auto& f : firsts) add_role({rid, f.index}, f.t, f.child, kFirstOccurrence);
}

void wavelet_tree::merge_blocks(wnode& v, uint32_t pos) {
  block& l = *v.chain[pos];
  block& r = *v.chain[pos + 1];
  if (r.size() == 0) {
    drop_block(v, pos + 1);
    return;
  }
  if (l.size() == 0) {
    drop_block(v, pos);
    return;
  }
  if (v.key.depth > 0) drop_role({r.id(), 1}, link_kind::up(), kBlockHead);
  if (v.internal)
    for (uint32_t t = 0; t < params_.rho; ++t)
      if (l.count(t) && r.count(t)) drop_role({r.id(), r.select(t, 1)}, link_kind::down(t), kFirstOccurrence);

  const uint32_t offset = l.size();
  const uint32_t rlen = r.size();
  const uint32_t ralive = v.tracked ? r.alive() : 0;
  l.append(r);
  relocate_on_merge(*this, l.id(), l.links(), r.id(), r.links(), offset);
  if (v.tracked) {
    v.total.add(pos + 1, rlen);
    v.alive.add(pos + 1, ralive);
  }
  drop_block(v, pos + 1);
  if (v.internal)
    for (uint32_t t = 0; t < params_.rho; ++t)
      if (l.count(t)) v.sf.mark(t, l.id());
  if (l.size() >= l.hard_capacity()) split_block(v, pos);
}

void wavelet_tree::erase(uint64_t i) {
  const position p = root_position(i);
  const reg_entry& root = entry(p.block);
  root.blk->mark_deleted(p.index);
  root.node->alive.add(root.pos + 1, -1);

  position q = p;
  uint64_t m = 0;
  for (uint32_t k = 0; k < h_; ++k) {
    const uint32_t t = blk(q.block).access(q.index);
    m = m * params_.rho + t;
    q = descend(q, t);
  }
  const reg_entry& leaf = entry(q.block);
  leaf.blk->mark_deleted(q.index);
  leaf.node->alive.add(leaf.pos + 1, -1);
  alpha_.release(alpha_.symbol_of(m + 1));

  const local_id ref = root.blk->links().attach_ref(
      p.index, {kExternalBlock, static_cast<local_id>(del_.size())});
  del_.push_back({p.block, ref});
  --n_;

  const uint64_t w = params_.w;
  if (del_.size() * w * w >= n_) clean();
  maybe_rebuild();
}

void wavelet_tree::clean() {
  if (del_.empty()) return;
  if (clean_hook_) clean_hook_(*this, true);
  for (size_t r = 0; r < del_.size(); ++r) clean_one(r);
  del_.clear();
  nbar_ = n_;
  ++cleanings_;
  for (auto& [key, v] : nodes_) {
    if (!v->internal) continue;
    std::vector<block_id> ids;
    for (const auto& b : v->chain) ids.push_back(b->id());
    v->sf.rebuild(ids, [&](block_id id, uint32_t t) { return blk(id).count(t) > 0; });
  }
  if (clean_hook_) clean_hook_(*this, false);
}

void wavelet_tree::clean_one(size_t r) {
  const handle h = del_[r];
  std::vector<position> pts(h_ + 1);
  std::vector<uint32_t> digs(h_);
  pts[0] = {h.block, blk(h.block).links().index_of(h.local)};
  for (uint32_t k = 0; k < h_; ++k) {
    digs[k] = blk(pts[k].block).access(pts[k].index);
    pts[k + 1] = descend(pts[k], digs[k]);
  }

  struct replacement {
    uint32_t level;
    position parent;
    uint32_t t;
    position child;
    uint8_t role;
  };
  std::vector<replacement> repl;
  std::vector<handle> doomed;
  for (uint32_t k = 0; k < h_; ++k) {
    const block& b = blk(pts[k].block);
    const uint32_t t = digs[k];
    const uint32_t x = pts[k].index;
    const auto e = b.links().at(x, link_kind::down(t));
    if (!e) continue;
    if (e->roles & kFirstOccurrence) {
      const uint32_t rk = b.rank(t, x);
      if (b.count(t) > rk) {
        const uint32_t f = b.select(t, rk + 1);
        repl.push_back({k, {b.id(), f}, t, descend({b.id(), f}, t), kFirstOccurrence});
      }
    }
    if (e->roles & kBlockHead) {
      const block& c = blk(pts[k + 1].block);
      if (c.size() > 1) repl.push_back({k, ascend({c.id(), 2}), t, {c.id(), 2}, kBlockHead});
    }
    doomed.push_back({b.id(), e->local});
  }
  for (const handle& d : doomed) unregister_link(*this, d);
  blk(h.block).links().detach(h.local);

  for (uint32_t k = 0; k <= h_; ++k) {
    const reg_entry& e = entry(pts[k].block);
    if (e.node->tracked && e.blk->is_alive(pts[k].index))
      fail(errc::invariant, "expunging an alive symbol");
    e.blk->erase(pts[k].index);
    if (e.node->tracked) e.node->total.add(e.pos + 1, -1);
    if (e.node->internal && e.blk->count(digs[k]) == 0) e.node->sf.unmark(digs[k], pts[k].block);
  }
  auto adjust = [&](position q, uint32_t level) {
    if (q.block == pts[level].block && q.index > pts[level].index) --q.index;
    return q;
  };
  for (const auto& rp : repl)
    add_role(adjust(rp.parent, rp.level), rp.t, adjust(rp.child, rp.level + 1), rp.role);
  --nbar_;

  for (uint32_t k = 0; k <= h_; ++k) {
    wnode& v = *entry(pts[k].block).node;
    settle(v, pts[k].block);
  }
}

void wavelet_tree::maybe_rebuild() {
  const uint32_t w = params_.w;
  if (nbar_ >= (uint64_t{1} << w)) {
    // Dead symbols alone pushed the stored length over; expunging them is enough.
    if (n_ < (uint64_t{1} << w))
      clean();
    else
      rebuild(w_for(n_));
  }
  else if (w > cfg_.min_w && nbar_ <= (uint64_t{1} << (w - 2)))
    rebuild(w_for(n_));
}

}  // namespace dynwt
