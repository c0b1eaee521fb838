#include "dynwt/psums.hpp"

#include <string>

#include "dynwt/errors.hpp"

namespace dynwt {

uint32_t partial_sums::next_prio() {
  seed_ ^= seed_ << 13;
  seed_ ^= seed_ >> 7;
  seed_ ^= seed_ << 17;
  return static_cast<uint32_t>(seed_ >> 32);
}

void partial_sums::pull(uint32_t x) {
  node& n = nodes_[x];
  n.size = 1 + size_of(n.left) + size_of(n.right);
  n.sum = n.val + sum_of(n.left) + sum_of(n.right);
}

uint32_t partial_sums::merge(uint32_t a, uint32_t b) {
  if (a == kNil) return b;
  if (b == kNil) return a;
  if (nodes_[a].prio >= nodes_[b].prio) {
    nodes_[a].right = merge(nodes_[a].right, b);
    pull(a);
    return a;
  }
  nodes_[b].left = merge(a, nodes_[b].left);
  pull(b);
  return b;
}

void partial_sums::split(uint32_t x, size_t k, uint32_t& a, uint32_t& b) {
  if (x == kNil) {
    a = b = kNil;
    return;
  }
  if (size_of(nodes_[x].left) >= k) {
    split(nodes_[x].left, k, a, nodes_[x].left);
    b = x;
  } else {
    split(nodes_[x].right, k - size_of(nodes_[x].left) - 1, nodes_[x].right, b);
    a = x;
  }
  pull(x);
}

uint32_t partial_sums::find(size_t j) const {
  if (j == 0 || j > size()) fail(errc::out_of_range, "partial sums entry " + std::to_string(j));
  uint32_t x = root_;
  for (;;) {
    const size_t l = size_of(nodes_[x].left);
    if (j <= l) {
      x = nodes_[x].left;
    } else if (j == l + 1) {
      return x;
    } else {
      j -= l + 1;
      x = nodes_[x].right;
    }
  }
}

uint64_t partial_sums::sum(size_t j) const {
  if (j > size()) fail(errc::out_of_range, "partial sums prefix " + std::to_string(j));
  uint64_t s = 0;
  uint32_t x = root_;
  while (x != kNil && j > 0) {
    const size_t l = size_of(nodes_[x].left);
    if (j <= l) {
      x = nodes_[x].left;
    } else {
      s += sum_of(nodes_[x].left) + nodes_[x].val;
      j -= l + 1;
      x = nodes_[x].right;
    }
  }
  return s;
}

std::pair<size_t, uint64_t> partial_sums::search(uint64_t i) const {
  if (i == 0 || i > total()) fail(errc::out_of_range, "partial sums search " + std::to_string(i));
  size_t j = 0;
  uint32_t x = root_;
  for (;;) {
    const uint64_t ls = sum_of(nodes_[x].left);
    if (i <= ls) {
      x = nodes_[x].left;
    } else if (i <= ls + nodes_[x].val) {
      return {j + size_of(nodes_[x].left) + 1, i - ls};
    } else {
      i -= ls + nodes_[x].val;
      j += size_of(nodes_[x].left) + 1;
      x = nodes_[x].right;
    }
  }
}

uint64_t partial_sums::value(size_t j) const { return nodes_[find(j)].val; }

void partial_sums::add_at(uint32_t x, size_t j, int64_t delta) {
  const size_t l = size_of(nodes_[x].left);
  if (j <= l)
    add_at(nodes_[x].left, j, delta);
  else if (j > l + 1)
    add_at(nodes_[x].right, j - l - 1, delta);
  else
    nodes_[x].val += delta;
  nodes_[x].sum += delta;
}

void partial_sums::add(size_t j, int64_t delta) {
  const uint32_t x = find(j);
  if (delta < 0 && nodes_[x].val < static_cast<uint64_t>(-delta))
    fail(errc::underflow, "partial sums entry would go negative");
  add_at(root_, j, delta);
}

void partial_sums::insert(size_t j, uint64_t value) {
  if (j == 0 || j > size() + 1) fail(errc::out_of_range, "partial sums insert " + std::to_string(j));
  uint32_t x;
  if (!free_.empty()) {
    x = free_.back();
    free_.pop_back();
    nodes_[x] = node{};
  } else {
    x = static_cast<uint32_t>(nodes_.size());
    nodes_.emplace_back();
  }
  nodes_[x].prio = next_prio();
  nodes_[x].val = nodes_[x].sum = value;
  uint32_t a, b;
  split(root_, j - 1, a, b);
  root_ = merge(merge(a, x), b);
}

void partial_sums::remove(size_t j) {
  if (value(j) != 0) fail(errc::unsupported, "only zero entries can be removed");
  uint32_t a, mid, b;
  split(root_, j - 1, a, b);
  split(b, 1, mid, b);
  free_.push_back(mid);
  root_ = merge(a, b);
}

void partial_sums::clear() {
  nodes_.clear();
  free_.clear();
  root_ = kNil;
}

void partial_sums::collect(uint32_t x, std::vector<uint64_t>& out) const {
  if (x == kNil) return;
  collect(nodes_[x].left, out);
  out.push_back(nodes_[x].val);
  collect(nodes_[x].right, out);
}

std::vector<uint64_t> partial_sums::values() const {
  std::vector<uint64_t> out;
  collect(root_, out);
  return out;
}

}  // namespace dynwt
