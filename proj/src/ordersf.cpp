#include "dynwt/ordersf.hpp"

#include <string>

#include "dynwt/errors.hpp"

namespace dynwt {
namespace {

constexpr uint64_t kGap = uint64_t{1} << 32;

}  // namespace

split_find::split_find(uint32_t rho) : marks_(rho) {}

uint64_t split_find::label(block_id id) const {
  auto it = label_.find(id);
  if (it == label_.end()) fail(errc::unknown_block, "block " + std::to_string(id) + " not in chain");
  return it->second;
}

void split_find::relabel() {
  std::map<uint64_t, block_id> order;
  uint64_t next = kGap;
  for (auto& [old, id] : order_) {
    const uint64_t now = next;
    next += kGap;
    order.emplace(now, id);
    label_[id] = now;
  }
  for (auto& m : marks_) {
    std::map<uint64_t, block_id> fresh;
    for (auto& [old, id] : m) fresh.emplace(label_[id], id);
    m = std::move(fresh);
  }
  order_ = std::move(order);
}

void split_find::insert_block(block_id after, block_id id) {
  if (label_.count(id)) fail(errc::duplicate_id, "block " + std::to_string(id) + " already in chain");
  for (int attempt = 0; attempt < 2; ++attempt) {
    uint64_t lo = 0;
    auto next = order_.begin();
    if (after != kNoBlock) {
      lo = label(after);
      next = std::next(order_.find(lo));
    }
    const uint64_t hi = next == order_.end() ? ~uint64_t{0} : next->first;
    uint64_t l;
    if (next == order_.end() && hi - lo > kGap)
      l = lo + kGap;
    else
      l = lo + (hi - lo) / 2;
    if (l > lo && l < hi) {
      label_[id] = l;
      order_.emplace(l, id);
      return;
    }
    relabel();
  }
  fail(errc::overflow, "order labels exhausted");
}

void split_find::erase_block(block_id id) {
  const uint64_t l = label(id);
  for (auto& m : marks_) m.erase(l);
  order_.erase(l);
  label_.erase(id);
}

void split_find::mark(uint32_t t, block_id id) { marks_.at(t).emplace(label(id), id); }

void split_find::unmark(uint32_t t, block_id id) { marks_.at(t).erase(label(id)); }

bool split_find::marked(uint32_t t, block_id id) const { return marks_.at(t).count(label(id)) != 0; }

std::optional<block_id> split_find::find(uint32_t t, block_id id) const {
  const auto& m = marks_.at(t);
  auto it = m.lower_bound(label(id));
  if (it == m.begin()) return std::nullopt;
  return std::prev(it)->second;
}

void split_find::rebuild(const std::vector<block_id>& chain,
                         const std::function<bool(block_id, uint32_t)>& has) {
  label_.clear();
  order_.clear();
  for (auto& m : marks_) m.clear();
  uint64_t next = kGap;
  for (block_id id : chain) {
    if (label_.count(id)) fail(errc::duplicate_id, "block listed twice");
    label_[id] = next;
    order_.emplace(next, id);
    for (uint32_t t = 0; t < marks_.size(); ++t)
      if (has(id, t)) marks_[t].emplace(next, id);
    next += kGap;
  }
}

size_t split_find::mark_count() const {
  size_t n = 0;
  for (const auto& m : marks_) n += m.size();
  return n;
}

size_t split_find::heap_bytes() const {
  // Red-black tree nodes carry three pointers and a color besides the value.
  const size_t map_node = 4 * sizeof(void*) + sizeof(uint64_t) + sizeof(block_id);
  return (order_.size() + mark_count()) * map_node +
         label_.size() * (sizeof(block_id) + sizeof(uint64_t) + 2 * sizeof(void*));
}

}  // namespace dynwt
