#include <algorithm>

#include "dynwt/errors.hpp"
#include "dynwt/wavelet_tree.hpp"

namespace dynwt {

wavelet_tree wavelet_tree::build_from(std::span<const uint64_t> symbols, tree_config cfg) {
  wavelet_tree t(cfg);
  const uint32_t w = t.w_for(symbols.size());
  if (w != t.params_.w) t.setup(w);
  std::vector<uint64_t> slots;
  slots.reserve(symbols.size());
  for (uint64_t a : symbols) {
    if (cfg.sigma && a >= cfg.sigma) fail(errc::out_of_range, "symbol outside the alphabet");
    slots.push_back(t.alpha_.acquire(a));
  }
  t.assemble(std::move(slots), std::vector<bool>(symbols.size(), true));
  return t;
}

void wavelet_tree::rebuild(uint32_t w) {
  const auto symbols = to_vector();
  setup(w);
  std::vector<uint64_t> slots;
  slots.reserve(symbols.size());
  for (uint64_t a : symbols) slots.push_back(alpha_.acquire(a));
  assemble(std::move(slots), std::vector<bool>(symbols.size(), true));
  ++rebuilds_;
}

void wavelet_tree::assemble(std::vector<uint64_t> slots, std::vector<bool> alive) {
  nodes_.clear();
  registry_.clear();
  free_ids_.clear();
  del_.clear();
  nbar_ = slots.size();
  n_ = static_cast<uint64_t>(std::count(alive.begin(), alive.end(), true));
  build_node({0, 0}, std::move(slots), std::move(alive));
  link_all();
}

void wavelet_tree::build_node(node_key k, std::vector<uint64_t> slots, std::vector<bool> alive) {
  wnode& v = make_node(k, false);
  const uint32_t cap = params_.cap_symbols();
  const size_t len = slots.size();
  std::vector<uint8_t> digits;
  if (v.internal) {
    uint64_t div = 1;
    for (uint32_t d = k.depth + 1; d < h_; ++d) div *= params_.rho;
    digits.resize(len);
    for (size_t e = 0; e < len; ++e) digits[e] = static_cast<uint8_t>(((slots[e] - 1) / div) % params_.rho);
  }
  size_t at = 0;
  do {
    const size_t sz = std::min<size_t>(cap, len - at);
    const std::vector<bool> part(alive.begin() + at, alive.begin() + at + sz);
    std::unique_ptr<block> b;
    if (v.internal)
      b = block::build(params_, true, v.tracked, std::span<const uint8_t>(digits).subspan(at, sz), &part);
    else
      b = block::build_counts(params_, v.tracked, static_cast<uint32_t>(sz), &part);
    adopt(v, static_cast<uint32_t>(v.chain.size()), std::move(b));
    at += sz;
  } while (at < len);
  if (!v.internal) return;

  slots.shrink_to_fit();
  for (uint32_t t = 0; t < params_.rho; ++t) {
    std::vector<uint64_t> cs;
    std::vector<bool> ca;
    for (size_t e = 0; e < len; ++e)
      if (digits[e] == t) {
        cs.push_back(slots[e]);
        ca.push_back(alive[e]);
      }
    if (!cs.empty()) build_node(child_key(k, t), std::move(cs), std::move(ca));
  }
}

void wavelet_tree::link_all() {
  for (auto& [key, vp] : nodes_) {
    wnode& v = *vp;
    if (!v.internal) continue;
    for (uint32_t t = 0; t < params_.rho; ++t) {
      std::vector<uint64_t> pstart(v.chain.size() + 1, 0);
      for (size_t j = 0; j < v.chain.size(); ++j) pstart[j + 1] = pstart[j] + v.chain[j]->count(t);
      if (pstart.back() == 0) continue;
      const wnode* c = find_node(child_key(key, t));
      if (!c) fail(errc::invariant, "child node missing for an occurring digit");
      std::vector<uint64_t> cstart(c->chain.size() + 1, 0);
      for (size_t q = 0; q < c->chain.size(); ++q) cstart[q + 1] = cstart[q] + c->chain[q]->size();
      if (cstart.back() != pstart.back()) fail(errc::invariant, "child size disagrees with digit count");

      auto locate = [](const std::vector<uint64_t>& start, uint64_t g) {
        const size_t q = std::upper_bound(start.begin(), start.end(), g - 1) - start.begin() - 1;
        return std::pair<size_t, uint32_t>(q, static_cast<uint32_t>(g - start[q]));
      };
      for (size_t j = 0; j < v.chain.size(); ++j) {
        const block& b = *v.chain[j];
        if (!b.count(t)) continue;
        const auto [q, y] = locate(cstart, pstart[j] + 1);
        add_role({b.id(), b.select(t, 1)}, t, {c->chain[q]->id(), y}, kFirstOccurrence);
      }
      for (size_t q = 0; q < c->chain.size(); ++q) {
        if (!c->chain[q]->size()) continue;
        const auto [j, r] = locate(pstart, cstart[q] + 1);
        const block& b = *v.chain[j];
        add_role({b.id(), b.select(t, r)}, t, {c->chain[q]->id(), 1}, kBlockHead);
      }
    }
  }
}

std::vector<bool> wavelet_tree::root_alive() const {
  std::vector<bool> out;
  for (const auto& b : nodes_.begin()->second->chain) {
    const auto m = b->alive_mask();
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

std::vector<uint64_t> wavelet_tree::reconstruct() const {
  std::map<node_key, std::vector<uint64_t>> seqs;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    const node_key k = it->first;
    const wnode& v = *it->second;
    std::vector<uint64_t> out;
    if (!v.internal) {
      out.assign(node_size(k), k.prefix + 1);
    } else {
      const auto digits = node_digits(k);
      std::vector<size_t> next(params_.rho, 0);
      std::vector<std::vector<uint64_t>*> kids(params_.rho, nullptr);
      for (uint32_t t = 0; t < params_.rho; ++t) {
        auto c = seqs.find(child_key(k, t));
        if (c != seqs.end()) kids[t] = &c->second;
      }
      out.reserve(digits.size());
      for (uint8_t t : digits) {
        if (!kids[t] || next[t] >= kids[t]->size())
          fail(errc::invariant, "node chain longer than its child");
        out.push_back((*kids[t])[next[t]++]);
      }
      for (uint32_t t = 0; t < params_.rho; ++t) {
        if (kids[t] && next[t] != kids[t]->size()) fail(errc::invariant, "child chain longer than its share");
        seqs.erase(child_key(k, t));
      }
    }
    seqs.emplace(k, std::move(out));
  }
  return std::move(seqs.begin()->second);
}

std::vector<uint64_t> wavelet_tree::to_vector() const {
  const auto slots = reconstruct();
  const auto alive = root_alive();
  std::vector<uint64_t> out;
  out.reserve(n_);
  for (size_t e = 0; e < slots.size(); ++e)
    if (alive[e]) out.push_back(alpha_.symbol_of(slots[e]));
  return out;
}

std::vector<node_key> wavelet_tree::nodes() const {
  std::vector<node_key> out;
  for (const auto& [k, v] : nodes_) out.push_back(k);
  return out;
}

std::vector<uint8_t> wavelet_tree::node_digits(node_key k) const {
  const wnode* v = find_node(k);
  if (!v) return {};
  std::vector<uint8_t> out;
  for (const auto& b : v->chain) {
    const auto d = b->digits();
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

uint64_t wavelet_tree::node_size(node_key k) const {
  const wnode* v = find_node(k);
  if (!v) return 0;
  uint64_t s = 0;
  for (const auto& b : v->chain) s += b->size();
  return s;
}

}  // namespace dynwt
