#include "dynwt/block.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <mutex>
#include <string>

#include "dynwt/chunk_codec.hpp"
#include "dynwt/errors.hpp"

namespace dynwt {
namespace {

constexpr std::array<uint64_t, kMaxChunkSymbols + 1> make_factorials() {
  std::array<uint64_t, kMaxChunkSymbols + 1> f{};
  f[0] = 1;
  for (uint32_t i = 1; i <= kMaxChunkSymbols; ++i) f[i] = f[i - 1] * i;
  return f;
}

constexpr auto kFact = make_factorials();

uint32_t width_of(uint64_t multinomial) {
  return multinomial <= 1 ? 0 : 64 - std::countl_zero(multinomial - 1);
}

// Length and offset width of every class header, for headers up to 16 bits.
// Entries for classes longer than the codec allows hold kBadShape.
constexpr uint16_t kBadShape = 0xffff;

const std::vector<uint16_t>* shape_table(uint32_t rho, uint32_t ccb) {
  if (rho * ccb > 16) return nullptr;
  static std::mutex mu;
  static std::map<std::pair<uint32_t, uint32_t>, std::vector<uint16_t>> cache;
  const std::lock_guard<std::mutex> lock(mu);
  auto [it, fresh] = cache.try_emplace({rho, ccb});
  if (!fresh) return &it->second;
  std::vector<uint16_t>& tab = it->second;
  tab.resize(size_t{1} << (rho * ccb));
  const uint64_t mask = (uint64_t{1} << ccb) - 1;
  for (uint64_t h = 0; h < tab.size(); ++h) {
    uint32_t len = 0;
    for (uint32_t t = 0; t < rho; ++t) len += static_cast<uint32_t>((h >> (t * ccb)) & mask);
    if (len > kMaxChunkSymbols) {
      tab[h] = kBadShape;
      continue;
    }
    uint64_t mul = kFact[len];
    for (uint32_t t = 0; t < rho; ++t) mul /= kFact[(h >> (t * ccb)) & mask];
    tab[h] = static_cast<uint16_t>(len | width_of(mul) << 8);
  }
  return &tab;
}

void check(bool ok, const std::string& what) {
  if (!ok) fail(errc::invariant, "block audit: " + what);
}

}  // namespace

block::block(const block_params& p, bool payload, bool track_alive)
    : rho_(payload ? p.rho : 1),
      tau_(p.tau),
      bmax_(p.chunk_max()),
      ccb_(p.class_counter_bits()),
      mini_len_(p.mini_symbols()),
      cap_(p.cap_symbols()),
      payload_(payload),
      track_(track_alive),
      params_(p),
      links_(p.rho) {
  if (payload && rho_ * ccb_ > 64)
    fail(errc::unsupported, "class header wider than a machine word");
  if (payload) shapes_ = shape_table(rho_, ccb_);
  minis_.emplace_back();
  lens_.assign(1, std::vector<uint32_t>(1, 0));
  alives_.assign(1, std::vector<uint32_t>(1, 0));
  cnts_.assign(1, std::vector<uint32_t>(rho_, 0));
}

std::unique_ptr<block> block::build(const block_params& p, bool payload, bool track_alive,
                                    std::span<const uint8_t> digits,
                                    const std::vector<bool>* alive) {
  auto b = std::make_unique<block>(p, payload, track_alive);
  std::vector<bool> all;
  if (!alive) all.assign(digits.size(), true);
  b->rebuild_from(digits, alive ? *alive : all);
  return b;
}

std::unique_ptr<block> block::build_counts(const block_params& p, bool track_alive, uint32_t len,
                                           const std::vector<bool>* alive) {
  std::vector<uint8_t> zeros(len, 0);
  return build(p, false, track_alive, zeros, alive);
}

std::unique_ptr<block> block::from_images(const block_params& p, bool payload, bool track_alive,
                                          std::vector<miniblock_image> images) {
  auto b = std::make_unique<block>(p, payload, track_alive);
  if (images.empty()) return b;
  b->minis_.clear();
  for (auto& im : images) {
    mini m;
    m.len = im.len;
    m.bits = std::move(im.chunks);
    m.live = std::move(im.live);
    b->minis_.push_back(std::move(m));
  }
  const size_t q = b->minis_.size();
  b->lens_.assign(1, std::vector<uint32_t>(q, 0));
  b->alives_.assign(1, std::vector<uint32_t>(q, 0));
  b->cnts_.assign(1, std::vector<uint32_t>(q * b->rho_, 0));
  for (uint32_t k = 0; k < q; ++k) b->set_leaf_counts(k);
  b->rebuild_levels();
  return b;
}

// ---- chunk stream -------------------------------------------------------

block::cursor block::read_cursor(const mini& m, size_t bit, uint32_t start) const {
  cursor c;
  c.bit = bit;
  c.start = start;
  c.counts = m.bits.read(bit, header_bits());
  if (shapes_) {
    const uint16_t sh = (*shapes_)[c.counts];
    if (sh == kBadShape) fail(errc::corrupt_chunk, "chunk longer than codec limit");
    c.len = sh & 0xff;
    c.width = sh >> 8;
    return c;
  }
  uint32_t len = 0;
  for (uint32_t t = 0; t < rho_; ++t) len += class_count(c.counts, t);
  if (len > kMaxChunkSymbols) fail(errc::corrupt_chunk, "chunk longer than codec limit");
  uint64_t mul = kFact[len];
  for (uint32_t t = 0; t < rho_; ++t) mul /= kFact[class_count(c.counts, t)];
  c.len = len;
  c.width = width_of(mul);
  return c;
}

std::vector<block::cursor> block::cursors(const mini& m) const {
  std::vector<cursor> out;
  cursors_into(m, out);
  return out;
}

void block::cursors_into(const mini& m, std::vector<cursor>& out) const {
  out.clear();
  size_t bit = 0;
  uint32_t start = 0;
  while (start < m.len) {
    out.push_back(read_cursor(m, bit, start));
    const cursor& c = out.back();
    if (c.len == 0) fail(errc::corrupt_chunk, "empty chunk in stream");
    bit += header_bits() + c.width;
    start += c.len;
  }
}

void block::decode(const mini& m, const cursor& c, uint8_t* out) const {
  std::array<uint8_t, kMaxArity> counts{};
  for (uint32_t t = 0; t < rho_; ++t) counts[t] = static_cast<uint8_t>(class_count(c.counts, t));
  const uint64_t offset = m.bits.read(c.bit + header_bits(), c.width);
  decode_chunk_into(std::span<const uint8_t>(counts.data(), rho_), offset, out);
}

void block::encode_run(std::span<const uint8_t> run, bit_string& out) const {
  std::array<uint8_t, kMaxArity> counts{};
  for (size_t at = 0; at < run.size(); at += bmax_) {
    const auto piece = run.subspan(at, std::min<size_t>(bmax_, run.size() - at));
    std::fill(counts.begin(), counts.begin() + rho_, 0);
    for (uint8_t d : piece) ++counts[d];
    uint64_t header = 0;
    uint64_t mul = kFact[piece.size()];
    for (uint32_t t = 0; t < rho_; ++t) {
      header |= uint64_t{counts[t]} << (t * ccb_);
      mul /= kFact[counts[t]];
    }
    out.append(header, header_bits());
    const std::span<const uint8_t> cls(counts.data(), rho_);
    out.append(chunk_offset(piece, cls), width_of(mul));
  }
}

std::vector<uint8_t> block::mini_digits(const mini& m) const {
  std::vector<uint8_t> out(m.len, 0);
  if (!payload_) return out;
  for (const cursor& c : cursors(m)) decode(m, c, out.data() + c.start);
  return out;
}

void block::fill_mini(mini& m, std::span<const uint8_t> run) const {
  m.len = static_cast<uint32_t>(run.size());
  m.bits.clear();
  if (payload_) encode_run(run, m.bits);
}

// ---- counting tree -----------------------------------------------------

void block::set_leaf_counts(uint32_t k) {
  const mini& m = minis_[k];
  lens_[0][k] = m.len;
  alives_[0][k] = track_ ? static_cast<uint32_t>(m.live.popcount(0, m.live.size())) : m.len;
  uint32_t* cnt = &cnts_[0][size_t{k} * rho_];
  std::fill(cnt, cnt + rho_, 0);
  if (!payload_) {
    cnt[0] = m.len;
    return;
  }
  for (const cursor& c : cursors(m))
    for (uint32_t t = 0; t < rho_; ++t) cnt[t] += class_count(c.counts, t);
}

void block::rebuild_levels() {
  lens_.resize(1);
  alives_.resize(1);
  cnts_.resize(1);
  while (lens_.back().size() > 1) {
    const auto& l = lens_.back();
    const auto& a = alives_.back();
    const auto& c = cnts_.back();
    const size_t q = (l.size() + tau_ - 1) / tau_;
    std::vector<uint32_t> nl(q, 0), na(q, 0), nc(q * rho_, 0);
    for (size_t j = 0; j < l.size(); ++j) {
      nl[j / tau_] += l[j];
      na[j / tau_] += a[j];
      for (uint32_t t = 0; t < rho_; ++t) nc[(j / tau_) * rho_ + t] += c[j * rho_ + t];
    }
    lens_.push_back(std::move(nl));
    alives_.push_back(std::move(na));
    cnts_.push_back(std::move(nc));
  }
}

void block::bump(uint32_t k, uint8_t t, int dlen, int dalive) {
  for (size_t lev = 0; lev < lens_.size(); ++lev, k /= tau_) {
    lens_[lev][k] += dlen;
    alives_[lev][k] += dalive;
    cnts_[lev][size_t{k} * rho_ + t] += dlen;
  }
}

void block::rebuild_from(std::span<const uint8_t> digits, const std::vector<bool>& alive) {
  const uint32_t len = static_cast<uint32_t>(digits.size());
  const uint32_t q = std::max<uint32_t>(1, (len + mini_len_ - 1) / mini_len_);
  minis_.assign(q, mini{});
  uint32_t at = 0;
  for (uint32_t k = 0; k < q; ++k) {
    const uint32_t sz = len / q + (k < len % q ? 1 : 0);
    fill_mini(minis_[k], digits.subspan(at, sz));
    if (track_)
      for (uint32_t j = 0; j < sz; ++j) minis_[k].live.push_back(alive[at + j]);
    at += sz;
  }
  lens_.assign(1, std::vector<uint32_t>(q, 0));
  alives_.assign(1, std::vector<uint32_t>(q, 0));
  cnts_.assign(1, std::vector<uint32_t>(size_t{q} * rho_, 0));
  for (uint32_t k = 0; k < q; ++k) set_leaf_counts(k);
  rebuild_levels();
}

block::locus block::locate(uint32_t i) const {
  uint32_t j = 0;
  for (size_t lev = lens_.size() - 1; lev > 0; --lev) {
    const auto& below = lens_[lev - 1];
    const uint32_t end = std::min<uint32_t>((j + 1) * tau_, static_cast<uint32_t>(below.size()));
    uint32_t c = j * tau_;
    for (; c + 1 < end && i > below[c]; ++c) i -= below[c];
    j = c;
  }
  return {j, i};
}

// ---- queries -----------------------------------------------------------

uint32_t block::alive() const {
  if (!track_) fail(errc::unsupported, "block does not track deletions");
  return alives_.back()[0];
}

uint32_t block::count(uint32_t t) const {
  if (t >= rho_) return 0;
  return cnts_.back()[t];
}

uint8_t block::access(uint32_t i) const {
  if (i == 0 || i > size()) fail(errc::out_of_range, "block access at " + std::to_string(i));
  if (!payload_) return 0;
  const locus l = locate(i);
  const mini& m = minis_[l.mini];
  size_t bit = 0;
  uint32_t start = 0;
  for (;;) {
    const cursor c = read_cursor(m, bit, start);
    if (l.pos <= start + c.len) {
      std::array<uint8_t, kMaxChunkSymbols> buf;
      decode(m, c, buf.data());
      return buf[l.pos - start - 1];
    }
    bit += header_bits() + c.width;
    start += c.len;
  }
}

uint32_t block::rank(uint32_t t, uint32_t i) const {
  if (i > size()) fail(errc::out_of_range, "block rank at " + std::to_string(i));
  if (t >= rho_) fail(errc::invalid_digit, "digit >= arity");
  if (i == 0) return 0;
  if (i == size()) return count(t);
  if (!payload_) return i;
  uint32_t r = 0;
  uint32_t j = 0;
  for (size_t lev = lens_.size() - 1; lev > 0; --lev) {
    const auto& below = lens_[lev - 1];
    const uint32_t end = std::min<uint32_t>((j + 1) * tau_, static_cast<uint32_t>(below.size()));
    uint32_t c = j * tau_;
    for (; c + 1 < end && i > below[c]; ++c) {
      i -= below[c];
      r += cnts_[lev - 1][size_t{c} * rho_ + t];
    }
    j = c;
  }
  const mini& m = minis_[j];
  size_t bit = 0;
  uint32_t start = 0;
  for (;;) {
    const cursor c = read_cursor(m, bit, start);
    if (i >= start + c.len) {
      r += class_count(c.counts, t);
      if (i == start + c.len) return r;
    } else {
      std::array<uint8_t, kMaxChunkSymbols> buf;
      decode(m, c, buf.data());
      for (uint32_t k = 0; k < i - start; ++k) r += buf[k] == t;
      return r;
    }
    bit += header_bits() + c.width;
    start += c.len;
  }
}

uint32_t block::select(uint32_t t, uint32_t k) const {
  if (t >= rho_ || k == 0 || k > count(t))
    fail(errc::not_found, "block select of occurrence " + std::to_string(k));
  if (!payload_) return k;
  uint32_t pos = 0;
  uint32_t j = 0;
  for (size_t lev = lens_.size() - 1; lev > 0; --lev) {
    const auto& below = cnts_[lev - 1];
    const uint32_t n = static_cast<uint32_t>(lens_[lev - 1].size());
    const uint32_t end = std::min<uint32_t>((j + 1) * tau_, n);
    uint32_t c = j * tau_;
    for (; c + 1 < end && k > below[size_t{c} * rho_ + t]; ++c) {
      k -= below[size_t{c} * rho_ + t];
      pos += lens_[lev - 1][c];
    }
    j = c;
  }
  const mini& m = minis_[j];
  size_t bit = 0;
  uint32_t start = 0;
  for (;;) {
    const cursor c = read_cursor(m, bit, start);
    const uint32_t here = class_count(c.counts, t);
    if (k > here) {
      k -= here;
    } else {
      std::array<uint8_t, kMaxChunkSymbols> buf;
      decode(m, c, buf.data());
      for (uint32_t x = 0; x < c.len; ++x)
        if (buf[x] == t && --k == 0) return pos + start + x + 1;
    }
    bit += header_bits() + c.width;
    start += c.len;
  }
}

bool block::is_alive(uint32_t i) const {
  if (i == 0 || i > size()) fail(errc::out_of_range, "block position " + std::to_string(i));
  if (!track_) return true;
  const locus l = locate(i);
  return minis_[l.mini].live.test(l.pos - 1);
}

uint32_t block::alive_rank(uint32_t i) const {
  if (!track_) fail(errc::unsupported, "block does not track deletions");
  if (i > size()) fail(errc::out_of_range, "alive rank at " + std::to_string(i));
  if (i == 0) return 0;
  uint32_t r = 0;
  uint32_t j = 0;
  for (size_t lev = lens_.size() - 1; lev > 0; --lev) {
    const auto& below = lens_[lev - 1];
    const uint32_t end = std::min<uint32_t>((j + 1) * tau_, static_cast<uint32_t>(below.size()));
    uint32_t c = j * tau_;
    for (; c + 1 < end && i > below[c]; ++c) {
      i -= below[c];
      r += alives_[lev - 1][c];
    }
    j = c;
  }
  return r + static_cast<uint32_t>(minis_[j].live.popcount(0, i));
}

uint32_t block::alive_select(uint32_t k) const {
  if (!track_) fail(errc::unsupported, "block does not track deletions");
  if (k == 0 || k > alive()) fail(errc::not_found, "alive select of " + std::to_string(k));
  uint32_t pos = 0;
  uint32_t j = 0;
  for (size_t lev = lens_.size() - 1; lev > 0; --lev) {
    const auto& below = alives_[lev - 1];
    const uint32_t end = std::min<uint32_t>((j + 1) * tau_, static_cast<uint32_t>(below.size()));
    uint32_t c = j * tau_;
    for (; c + 1 < end && k > below[c]; ++c) {
      k -= below[c];
      pos += lens_[lev - 1][c];
    }
    j = c;
  }
  return pos + static_cast<uint32_t>(minis_[j].live.select1(k)) + 1;
}

// ---- updates -----------------------------------------------------------

void block::edit(mini& m, uint32_t pos, bool insert, uint8_t t) {
  thread_local std::vector<cursor> cs;
  thread_local std::vector<uint8_t> buf;
  cursors_into(m, cs);
  const int n = static_cast<int>(cs.size());
  int k = n - 1;
  for (int c = 0; c < n; ++c)
    if (cs[c].start + cs[c].len >= pos) {
      k = c;
      break;
    }
  int a = std::max(0, k - 1);
  int b = std::min(n - 1, k + 1);
  bit_string repl;
  for (;;) {
    const uint32_t first = n ? cs[a].start : 0;
    const uint32_t last = n ? cs[b].start + cs[b].len : 0;
    buf.assign(last - first, 0);
    for (int c = a; c <= b && n; ++c) decode(m, cs[c], buf.data() + (cs[c].start - first));
    if (insert)
      buf.insert(buf.begin() + (pos - 1 - first), t);
    else
      buf.erase(buf.begin() + (pos - 1 - first));
    const uint32_t len = static_cast<uint32_t>(buf.size());
    const uint32_t head = std::min(len, bmax_);
    const uint32_t tail = len == 0 ? 0 : len - (len - 1) / bmax_ * bmax_;
    if (len > 0 && a > 0 && cs[a - 1].len + head <= bmax_) {
      --a;
      continue;
    }
    if (len > 0 && b + 1 < n && cs[b + 1].len + tail <= bmax_) {
      ++b;
      continue;
    }
    if (len == 0 && a > 0 && b + 1 < n && cs[a - 1].len + cs[b + 1].len <= bmax_) {
      --a;
      continue;
    }
    break;
  }
  encode_run(buf, repl);
  const size_t from = n ? cs[a].bit : 0;
  const size_t to = n ? cs[b].bit + header_bits() + cs[b].width : 0;
  m.bits.splice(from, to, repl);
  m.len += insert ? 1 : -1;
}

void block::insert(uint32_t i, uint8_t t) {
  const uint32_t len = size();
  if (i == 0 || i > len + 1) fail(errc::out_of_range, "block insert at " + std::to_string(i));
  if (payload_ && t >= rho_) fail(errc::invalid_digit, "digit >= arity");
  if (!payload_) t = 0;
  if (len >= hard_capacity()) fail(errc::overflow, "block at hard capacity");
  locus l{0, 1};
  if (len > 0) {
    l = i <= len ? locate(i) : locate(len);
    if (i > len) ++l.pos;
  }
  mini& m = minis_[l.mini];
  if (payload_)
    edit(m, l.pos, true, t);
  else
    ++m.len;
  if (track_) m.live.insert_bit(l.pos - 1, true);
  bump(l.mini, t, 1, 1);
  links_.shift_on_insert(i);
  if (m.len > 2 * mini_len_) split_mini(l.mini);
}

void block::erase(uint32_t i) {
  if (i == 0 || i > size()) fail(errc::out_of_range, "block erase at " + std::to_string(i));
  links_.shift_on_erase(i);
  const locus l = locate(i);
  mini& m = minis_[l.mini];
  uint8_t t = 0;
  if (payload_) {
    t = access(i);
    edit(m, l.pos, false, 0);
  } else {
    --m.len;
  }
  bool was_alive = true;
  if (track_) {
    was_alive = m.live.test(l.pos - 1);
    m.live.erase_bit(l.pos - 1);
  }
  bump(l.mini, t, -1, was_alive ? -1 : 0);
  if (minis_.size() > 1 && m.len < mini_len_ / 2) merge_mini(l.mini);
}

void block::mark_deleted(uint32_t i) {
  if (!track_) fail(errc::unsupported, "block does not track deletions");
  if (i == 0 || i > size()) fail(errc::out_of_range, "block delete at " + std::to_string(i));
  const locus l = locate(i);
  mini& m = minis_[l.mini];
  if (!m.live.test(l.pos - 1)) fail(errc::double_delete, "element already deleted");
  m.live.set(l.pos - 1, false);
  bump(l.mini, 0, 0, -1);
}

void block::split_mini(uint32_t k) {
  const auto run = mini_digits(minis_[k]);
  const bit_string live = minis_[k].live;
  const uint32_t half = minis_[k].len / 2;
  mini right;
  fill_mini(minis_[k], std::span<const uint8_t>(run).first(half));
  fill_mini(right, std::span<const uint8_t>(run).subspan(half));
  if (track_) {
    minis_[k].live.clear();
    minis_[k].live.append(live, 0, half);
    right.live.append(live, half, live.size());
  }
  minis_.insert(minis_.begin() + k + 1, std::move(right));
  lens_[0].insert(lens_[0].begin() + k + 1, 0);
  alives_[0].insert(alives_[0].begin() + k + 1, 0);
  cnts_[0].insert(cnts_[0].begin() + size_t{k + 1} * rho_, rho_, 0);
  set_leaf_counts(k);
  set_leaf_counts(k + 1);
  rebuild_levels();
}

void block::merge_mini(uint32_t k) {
  const uint32_t lo = k + 1 < minis_.size() ? k : k - 1;
  auto run = mini_digits(minis_[lo]);
  const auto more = mini_digits(minis_[lo + 1]);
  run.insert(run.end(), more.begin(), more.end());
  bit_string live = minis_[lo].live;
  live.append(minis_[lo + 1].live, 0, minis_[lo + 1].live.size());
  const uint32_t total = static_cast<uint32_t>(run.size());
  if (total > 2 * mini_len_) {
    const uint32_t half = total / 2;
    fill_mini(minis_[lo], std::span<const uint8_t>(run).first(half));
    fill_mini(minis_[lo + 1], std::span<const uint8_t>(run).subspan(half));
    if (track_) {
      minis_[lo].live.clear();
      minis_[lo].live.append(live, 0, half);
      minis_[lo + 1].live.clear();
      minis_[lo + 1].live.append(live, half, live.size());
    }
    set_leaf_counts(lo);
    set_leaf_counts(lo + 1);
  } else {
    fill_mini(minis_[lo], run);
    if (track_) minis_[lo].live = std::move(live);
    minis_.erase(minis_.begin() + lo + 1);
    lens_[0].erase(lens_[0].begin() + lo + 1);
    alives_[0].erase(alives_[0].begin() + lo + 1);
    cnts_[0].erase(cnts_[0].begin() + size_t{lo + 1} * rho_,
                   cnts_[0].begin() + size_t{lo + 2} * rho_);
    set_leaf_counts(lo);
  }
  rebuild_levels();
}

std::unique_ptr<block> block::split(uint32_t m) {
  if (m > size()) fail(errc::out_of_range, "split point past block end");
  const auto d = digits();
  const auto a = alive_mask();
  auto right = std::make_unique<block>(params_, payload_, track_);
  const std::span<const uint8_t> ds(d);
  right->rebuild_from(ds.subspan(m), std::vector<bool>(a.begin() + m, a.end()));
  rebuild_from(ds.first(m), std::vector<bool>(a.begin(), a.begin() + m));
  return right;
}

void block::append(block& right) {
  auto d = digits();
  auto a = alive_mask();
  const auto rd = right.digits();
  const auto ra = right.alive_mask();
  d.insert(d.end(), rd.begin(), rd.end());
  a.insert(a.end(), ra.begin(), ra.end());
  rebuild_from(d, a);
  right.rebuild_from({}, {});
}

std::vector<uint8_t> block::digits() const {
  std::vector<uint8_t> out;
  out.reserve(size());
  for (const mini& m : minis_) {
    const auto d = mini_digits(m);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

std::vector<bool> block::alive_mask() const {
  std::vector<bool> out;
  out.reserve(size());
  for (const mini& m : minis_)
    for (uint32_t j = 0; j < m.len; ++j) out.push_back(track_ ? m.live.test(j) : true);
  return out;
}

// ---- introspection -----------------------------------------------------

void block::audit() const {
  check(!minis_.empty(), "no miniblocks");
  std::vector<uint32_t> l0(minis_.size()), a0(minis_.size()), c0(minis_.size() * rho_, 0);
  for (size_t k = 0; k < minis_.size(); ++k) {
    const mini& m = minis_[k];
    if (minis_.size() > 1)
      check(m.len >= mini_len_ / 2 && m.len <= 2 * mini_len_,
            "miniblock length " + std::to_string(m.len) + " outside bounds");
    if (track_) check(m.live.size() == m.len, "alive mask length");
    l0[k] = m.len;
    a0[k] = track_ ? static_cast<uint32_t>(m.live.popcount(0, m.len)) : m.len;
    if (!payload_) {
      check(m.bits.empty(), "count-only block holds payload");
      c0[k * rho_] = m.len;
      continue;
    }
    const auto cs = cursors(m);
    size_t end = 0;
    for (size_t c = 0; c < cs.size(); ++c) {
      check(cs[c].len >= 1 && cs[c].len <= bmax_, "chunk length out of range");
      if (c > 0) check(cs[c - 1].len + cs[c].len > bmax_, "chunk neighbor invariant");
      std::array<uint8_t, kMaxChunkSymbols> buf;
      decode(m, cs[c], buf.data());
      for (uint32_t t = 0; t < rho_; ++t) c0[k * rho_ + t] += class_count(cs[c].counts, t);
      end = cs[c].bit + header_bits() + cs[c].width;
    }
    check(end == m.bits.size(), "chunk stream length");
  }
  check(l0 == lens_[0], "miniblock lengths");
  check(a0 == alives_[0], "miniblock alive counts");
  check(c0 == cnts_[0], "miniblock digit counts");
  for (size_t lev = 1; lev < lens_.size(); ++lev) {
    const size_t q = lens_[lev].size();
    check(q == (lens_[lev - 1].size() + tau_ - 1) / tau_, "tree shape");
    for (size_t j = 0; j < q; ++j) {
      uint32_t len = 0, al = 0;
      std::vector<uint32_t> cn(rho_, 0);
      for (size_t c = j * tau_; c < std::min((j + 1) * tau_, lens_[lev - 1].size()); ++c) {
        len += lens_[lev - 1][c];
        al += alives_[lev - 1][c];
        for (uint32_t t = 0; t < rho_; ++t) cn[t] += cnts_[lev - 1][c * rho_ + t];
      }
      check(len == lens_[lev][j] && al == alives_[lev][j], "tree counters");
      for (uint32_t t = 0; t < rho_; ++t) check(cn[t] == cnts_[lev][j * rho_ + t], "tree digit counters");
    }
  }
  check(lens_.back().size() == 1, "tree root");
}

block_space block::space() const {
  block_space s;
  s.miniblocks = minis_.size();
  uint64_t nodes = 0;
  for (const auto& l : lens_) nodes += l.size();
  const uint64_t counters = rho_ + 1 + (track_ ? 1 : 0);
  s.counter_bits = nodes * counters * ceil_log2(uint64_t{2} * cap_ + 1);
  s.heap_bytes = sizeof(block) + links_.heap_bytes();
  for (const auto& l : lens_) s.heap_bytes += l.capacity() * 4;
  for (const auto& l : alives_) s.heap_bytes += l.capacity() * 4;
  for (const auto& l : cnts_) s.heap_bytes += l.capacity() * 4;
  for (const mini& m : minis_) {
    s.heap_bytes += sizeof(mini) + m.bits.heap_bytes() + m.live.heap_bytes();
    s.alive_bits += m.live.size();
    if (!payload_) continue;
    for (const cursor& c : cursors(m)) {
      ++s.chunks;
      s.offset_bits += c.width;
      s.class_bits += header_bits();
    }
  }
  return s;
}

std::vector<miniblock_image> block::images() const {
  std::vector<miniblock_image> out;
  for (const mini& m : minis_) out.push_back({m.len, m.bits, m.live});
  return out;
}

}  // namespace dynwt
