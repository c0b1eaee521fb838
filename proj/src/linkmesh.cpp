#include "dynwt/linkmesh.hpp"

#include <algorithm>

#include "dynwt/errors.hpp"

namespace dynwt {

link_table::link_table(uint32_t rho) : rho_(rho), by_kind_(rho + 1) {}

local_id link_table::allocate() {
  if (!free_.empty()) {
    const local_id id = free_.top();
    free_.pop();
    return id;
  }
  slots_.emplace_back();
  return static_cast<local_id>(slots_.size() - 1);
}

const link_table::slot& link_table::get(local_id id) const {
  if (id >= slots_.size() || slots_[id].index == 0)
    fail(errc::dangling_handle, "local id " + std::to_string(id) + " is not live");
  return slots_[id];
}

void link_table::insert_sorted(local_id id) {
  auto& v = by_kind_[slots_[id].kind];
  const uint32_t idx = slots_[id].index;
  auto it = std::lower_bound(v.begin(), v.end(), idx,
                             [&](local_id a, uint32_t i) { return slots_[a].index < i; });
  if (it != v.end() && slots_[*it].index == idx)
    fail(errc::duplicate_link, "a link of this kind already leaves index " + std::to_string(idx));
  v.insert(it, id);
}

void link_table::erase_sorted(local_id id) {
  auto& v = by_kind_[slots_[id].kind];
  auto it = std::lower_bound(v.begin(), v.end(), slots_[id].index,
                             [&](local_id a, uint32_t i) { return slots_[a].index < i; });
  v.erase(it);
}

local_id link_table::attach_link(uint32_t index, link_kind kind, handle remote, uint8_t roles) {
  if (index == 0) fail(errc::out_of_range, "link anchors are 1-based");
  if (!kind.is_up() && kind.digit() >= rho_) fail(errc::invalid_digit, "link digit >= arity");
  if (at(index, kind)) fail(errc::duplicate_link, "a link of this kind already leaves index " + std::to_string(index));
  const local_id id = allocate();
  slots_[id] = slot{index, kind.code(), remote, roles, true};
  insert_sorted(id);
  ++live_;
  return id;
}

local_id link_table::attach_ref(uint32_t index, handle remote) {
  if (index == 0) fail(errc::out_of_range, "anchors are 1-based");
  const local_id id = allocate();
  slots_[id] = slot{index, 0, remote, 0, false};
  ++live_;
  return id;
}

void link_table::detach(local_id id) {
  get(id);
  if (slots_[id].link) erase_sorted(id);
  slots_[id] = slot{};
  free_.push(id);
  --live_;
}

bool link_table::live(local_id id) const { return id < slots_.size() && slots_[id].index != 0; }

uint32_t link_table::index_of(local_id id) const { return get(id).index; }

bool link_table::is_link(local_id id) const { return get(id).link; }

link_end link_table::end(local_id id) const {
  const slot& s = get(id);
  return link_end{s.index, link_kind::from_code(s.kind), s.remote, id, s.roles};
}

void link_table::set_remote(local_id id, handle remote) {
  get(id);
  slots_[id].remote = remote;
}

void link_table::set_roles(local_id id, uint8_t roles) {
  get(id);
  slots_[id].roles = roles;
}

std::optional<link_end> link_table::last_at_or_before(uint32_t i, link_kind kind) const {
  const auto& v = by_kind_[kind.code()];
  auto it = std::upper_bound(v.begin(), v.end(), i,
                             [&](uint32_t x, local_id a) { return x < slots_[a].index; });
  if (it == v.begin()) return std::nullopt;
  return end(*std::prev(it));
}

std::optional<link_end> link_table::at(uint32_t i, link_kind kind) const {
  auto e = last_at_or_before(i, kind);
  if (e && e->index == i) return e;
  return std::nullopt;
}

std::vector<local_id> link_table::anchors_at(uint32_t i) const {
  std::vector<local_id> out;
  for (local_id id = 0; id < slots_.size(); ++id)
    if (slots_[id].index == i) out.push_back(id);
  return out;
}

void link_table::shift_on_insert(uint32_t i) {
  for (auto& s : slots_)
    if (s.index >= i) ++s.index;
}

void link_table::shift_on_erase(uint32_t i) {
  for (const auto& s : slots_)
    if (s.index == i) fail(errc::dangling_handle, "erasing an anchored element");
  for (auto& s : slots_)
    if (s.index > i) --s.index;
}

std::vector<std::pair<local_id, local_id>> link_table::split_off(uint32_t m, link_table& right) {
  std::vector<std::pair<local_id, local_id>> moves;
  for (local_id id = 0; id < slots_.size(); ++id) {
    const slot s = slots_[id];
    if (s.index <= m) continue;
    const local_id now = s.link
        ? right.attach_link(s.index - m, link_kind::from_code(s.kind), s.remote, s.roles)
        : right.attach_ref(s.index - m, s.remote);
    moves.emplace_back(id, now);
    detach(id);
  }
  return moves;
}

std::vector<std::pair<local_id, local_id>> link_table::absorb(link_table& right, uint32_t offset) {
  std::vector<std::pair<local_id, local_id>> moves;
  for (local_id id = 0; id < right.slots_.size(); ++id) {
    const slot s = right.slots_[id];
    if (s.index == 0) continue;
    const local_id now = s.link
        ? attach_link(s.index + offset, link_kind::from_code(s.kind), s.remote, s.roles)
        : attach_ref(s.index + offset, s.remote);
    moves.emplace_back(id, now);
  }
  right = link_table(right.rho_);
  return moves;
}

size_t link_table::owned_links() const {
  size_t n = 0;
  for (const auto& s : slots_) {
    if (s.index == 0 || !s.link) continue;
    if (s.kind == 0 && (s.roles & kBlockHead)) ++n;
    if (s.kind != 0 && (s.roles & kFirstOccurrence)) ++n;
  }
  return n;
}

size_t link_table::link_ends() const {
  size_t n = 0;
  for (const auto& v : by_kind_) n += v.size();
  return n;
}

size_t link_table::refs() const { return live_ - link_ends(); }

std::vector<local_id> link_table::live_ids() const {
  std::vector<local_id> out;
  for (local_id id = 0; id < slots_.size(); ++id)
    if (slots_[id].index) out.push_back(id);
  return out;
}

size_t link_table::heap_bytes() const {
  size_t b = slots_.capacity() * sizeof(slot) + free_.size() * sizeof(local_id);
  for (const auto& v : by_kind_) b += v.capacity() * sizeof(local_id) + sizeof(v);
  return b;
}

std::pair<handle, handle> register_link(link_directory& dir, block_id src_block,
                                        uint32_t src_index, link_kind src_kind,
                                        block_id dst_block, uint32_t dst_index,
                                        uint8_t roles) {
  link_table& src = dir.table(src_block);
  link_table& dst = dir.table(dst_block);
  const link_kind dst_kind = link_kind::up();
  if (src_kind.is_up())
    fail(errc::unsupported, "register links from the parent side");
  if (dst.at(dst_index, dst_kind))
    fail(errc::duplicate_link, "target already holds an up link");
  const local_id s = src.attach_link(src_index, src_kind, handle{}, roles);
  const local_id d = dst.attach_link(dst_index, dst_kind, handle{src_block, s}, roles);
  src.set_remote(s, handle{dst_block, d});
  return {handle{src_block, s}, handle{dst_block, d}};
}

void unregister_link(link_directory& dir, handle h) {
  link_table& a = dir.table(h.block);
  const link_end e = a.end(h.local);
  if (!a.is_link(h.local)) fail(errc::dangling_handle, "handle is not a link end");
  dir.table(e.remote.block).detach(e.remote.local);
  a.detach(h.local);
}

uint32_t resolve(link_directory& dir, handle h) { return dir.table(h.block).index_of(h.local); }

void retarget(link_directory& dir, const link_table& to, block_id to_block,
              const std::vector<std::pair<local_id, local_id>>& moves) {
  for (const auto& [from, now] : moves) {
    const link_end e = to.end(now);
    if (e.remote.block == kExternalBlock)
      dir.retarget_external(e.remote.local, handle{to_block, now});
    else
      dir.table(e.remote.block).set_remote(e.remote.local, handle{to_block, now});
  }
}

void relocate_on_split(link_directory& dir, block_id, link_table& old, block_id right_id,
                       link_table& right, uint32_t m) {
  retarget(dir, right, right_id, old.split_off(m, right));
}

void relocate_on_merge(link_directory& dir, block_id left_id, link_table& left, block_id,
                       link_table& right, uint32_t offset) {
  retarget(dir, left, left_id, left.absorb(right, offset));
}

}  // namespace dynwt
