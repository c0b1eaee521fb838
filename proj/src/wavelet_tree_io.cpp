#include <cstring>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "dynwt/errors.hpp"
#include "dynwt/wavelet_tree.hpp"

namespace dynwt {
namespace {

constexpr char kMagic[8] = {'D', 'Y', 'N', 'W', 'T', 'R', 'E', 'E'};
constexpr uint32_t kVersion = 1;

class writer {
 public:
  explicit writer(std::ostream& out) : out_(out) {}

  void u64(uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    out_.write(buf, 8);
  }
  void u32(uint32_t v) { u64(v); }
  void bits(const bit_string& b) {
    u64(b.size());
    const size_t words = (b.size() + 63) / 64;
    for (size_t i = 0; i < words; ++i) u64(b.words()[i]);
  }

 private:
  std::ostream& out_;
};

class reader {
 public:
  explicit reader(std::istream& in) : in_(in) {}

  uint64_t u64() {
    unsigned char buf[8];
    if (!in_.read(reinterpret_cast<char*>(buf), 8)) fail(errc::bad_format, "truncated input");
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  uint32_t u32() {
    const uint64_t v = u64();
    if (v > 0xffffffffu) fail(errc::bad_format, "field out of range");
    return static_cast<uint32_t>(v);
  }
  uint64_t count(uint64_t limit) {
    const uint64_t v = u64();
    if (v > limit) fail(errc::bad_format, "implausible count");
    return v;
  }
  bit_string bits() {
    bit_string b;
    uint64_t left = count(uint64_t{1} << 40);
    while (left) {
      const unsigned take = left >= 64 ? 64 : static_cast<unsigned>(left);
      uint64_t word = u64();
      if (take < 64 && (word >> take)) fail(errc::bad_format, "stray bits");
      b.append(word, take);
      left -= take;
    }
    return b;
  }

 private:
  std::istream& in_;
};

}  // namespace

void wavelet_tree::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  writer wr(out);
  wr.u32(kVersion);
  wr.u64(cfg_.sigma);
  wr.u32(cfg_.min_w);
  wr.u32(cfg_.epsilon.num);
  wr.u32(cfg_.epsilon.den);
  wr.u32(cfg_.delta.num);
  wr.u32(cfg_.delta.den);
  wr.u32(cfg_.cap_bits);
  wr.u32(cfg_.mini_bits);
  wr.u32(params_.w);
  wr.u64(n_);
  wr.u64(nbar_);
  wr.u64(rebuilds_);
  wr.u64(cleanings_);

  wr.u64(alpha_.next_unused());
  wr.u64(alpha_.free_slots().size());
  for (uint64_t s : alpha_.free_slots()) wr.u64(s);
  const auto live = alpha_.live_slots();
  wr.u64(live.size());
  for (uint64_t s : live) {
    wr.u64(s);
    wr.u64(alpha_.symbol_of(s));
    wr.u64(alpha_.occurrences(s));
  }

  wr.u64(nodes_.size());
  for (const auto& [key, v] : nodes_) {
    wr.u32(key.depth);
    wr.u64(key.prefix);
    wr.u64(v->chain.size());
    for (const auto& b : v->chain) {
      const auto images = b->images();
      wr.u64(images.size());
      for (const auto& im : images) {
        wr.u32(im.len);
        wr.bits(im.chunks);
        wr.bits(im.live);
      }
    }
  }

  const wnode& root = *nodes_.begin()->second;
  wr.u64(del_.size());
  for (const handle& h : del_) {
    const reg_entry& e = entry(h.block);
    wr.u64(root.total.sum(e.pos) + e.blk->links().index_of(h.local));
  }
  if (!out) fail(errc::io, "write failed");
}

wavelet_tree wavelet_tree::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    fail(errc::bad_format, "not a saved sequence");
  try {
    return load_body(in);
  } catch (const error& e) {
    if (e.code() == errc::bad_format || e.code() == errc::io) throw;
    fail(errc::bad_format, std::string("inconsistent content: ") + e.what());
  }
}

wavelet_tree wavelet_tree::load_body(std::istream& in) {
  reader rd(in);
  if (rd.u32() != kVersion) fail(errc::bad_format, "unknown version");
  tree_config cfg;
  cfg.sigma = rd.u64();
  cfg.min_w = rd.u32();
  cfg.epsilon = {rd.u32(), rd.u32()};
  cfg.delta = {rd.u32(), rd.u32()};
  cfg.cap_bits = rd.u32();
  cfg.mini_bits = rd.u32();
  if (cfg.min_w < 2 || cfg.min_w > 40 || cfg.epsilon.den == 0 || cfg.delta.den == 0)
    fail(errc::bad_format, "bad configuration");
  const uint32_t w = rd.u32();
  if (w < cfg.min_w || w > 40) fail(errc::bad_format, "bad word size");

  wavelet_tree t(cfg);
  t.setup(w);
  t.nodes_.clear();
  t.registry_.clear();
  t.free_ids_.clear();
  t.n_ = rd.u64();
  t.nbar_ = rd.u64();
  t.rebuilds_ = rd.u64();
  t.cleanings_ = rd.u64();
  if (t.n_ > t.nbar_) fail(errc::bad_format, "more alive than stored symbols");

  const uint64_t cap = t.alpha_.capacity();
  const uint64_t next = rd.u64();
  if (next == 0 || next > cap + 1) fail(errc::bad_format, "bad alphabet cursor");
  std::set<uint64_t> free;
  for (uint64_t k = rd.count(cap); k; --k) free.insert(rd.u64());
  std::vector<std::pair<uint64_t, std::pair<uint64_t, uint64_t>>> live;
  for (uint64_t k = rd.count(cap); k; --k) {
    const uint64_t slot = rd.u64();
    const uint64_t symbol = rd.u64();
    const uint64_t occ = rd.u64();
    if (slot == 0 || slot >= next || free.count(slot)) fail(errc::bad_format, "bad alphabet slot");
    if (cfg.sigma && symbol >= cfg.sigma) fail(errc::bad_format, "symbol outside the alphabet");
    live.push_back({slot, {symbol, occ}});
  }
  for (uint64_t s : free)
    if (s == 0 || s >= next) fail(errc::bad_format, "bad free slot");
  t.alpha_.restore(cap, next, free, live);

  const uint64_t node_count = rd.count(uint64_t{1} << 40);
  const uint32_t hard = 2 * t.params_.cap_symbols();
  for (uint64_t k = 0; k < node_count; ++k) {
    node_key key;
    key.depth = rd.u32();
    key.prefix = rd.u64();
    if (key.depth > t.h_ || (k == 0 && key != node_key{0, 0}) || t.nodes_.count(key) ||
        (!t.nodes_.empty() && key < t.nodes_.rbegin()->first))
      fail(errc::bad_format, "bad node key");
    if (key.depth > 0 && !t.find_node({key.depth - 1, key.prefix / t.params_.rho}))
      fail(errc::bad_format, "node without parent");
    wnode& v = t.make_node(key, false);
    const uint64_t blocks = rd.count(uint64_t{1} << 32);
    if (blocks == 0) fail(errc::bad_format, "empty chain");
    for (uint64_t j = 0; j < blocks; ++j) {
      const uint64_t minis = rd.count(hard);
      std::vector<miniblock_image> images(minis);
      uint64_t len = 0;
      for (auto& im : images) {
        im.len = rd.u32();
        im.chunks = rd.bits();
        im.live = rd.bits();
        len += im.len;
        if (len >= hard) fail(errc::bad_format, "block over capacity");
        if (!v.internal && !im.chunks.empty()) fail(errc::bad_format, "payload in a leaf");
        if (im.live.size() != (v.tracked ? im.len : 0)) fail(errc::bad_format, "alive mask length");
      }
      t.adopt(v, static_cast<uint32_t>(j),
              block::from_images(t.params_, v.internal, v.tracked, std::move(images)));
    }
  }
  if (t.nodes_.empty()) fail(errc::bad_format, "missing root");

  wnode& root = *t.nodes_.begin()->second;
  if (root.total.total() != t.nbar_ || root.alive.total() != t.n_)
    fail(errc::bad_format, "length mismatch");
  for (const auto& [key, v] : t.nodes_)
    for (const auto& b : v->chain) b->audit();
  t.link_all();
  const uint64_t dels = rd.count(t.nbar_);
  for (uint64_t r = 0; r < dels; ++r) {
    const uint64_t g = rd.u64();
    if (g == 0 || g > t.nbar_) fail(errc::bad_format, "bad deleted position");
    const auto [j, off] = root.total.search(g);
    block& b = *root.chain[j - 1];
    const local_id ref =
        b.links().attach_ref(static_cast<uint32_t>(off), {kExternalBlock, static_cast<local_id>(r)});
    t.del_.push_back({b.id(), ref});
  }
  t.audit();
  return t;
}

}  // namespace dynwt
