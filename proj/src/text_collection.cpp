#include "dynwt/text_collection.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

#include "dynwt/errors.hpp"

namespace dynwt {
namespace {

constexpr char kMagic[8] = {'D', 'Y', 'N', 'W', 'T', 'T', 'X', 'T'};

uint64_t sym(char b) { return static_cast<unsigned char>(b) + uint64_t{1}; }

void put(std::ostream& out, uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
  out.write(buf, 8);
}

uint64_t get(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) fail(errc::bad_format, "truncated input");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

}  // namespace

tree_config text_collection::default_config() {
  tree_config c;
  c.sigma = kSigma;
  return c;
}

text_collection::text_collection(tree_config cfg) : seq_(cfg), fenwick_(kSigma + 1, 0) {
  if (cfg.sigma != kSigma) fail(errc::unsupported, "a collection needs a 257-symbol alphabet");
}

uint64_t text_collection::smaller(uint64_t a) const {
  int64_t s = 0;
  for (uint64_t i = a; i > 0; i -= i & (~i + 1)) s += fenwick_[i];
  return static_cast<uint64_t>(s);
}

void text_collection::bump(uint64_t a, int64_t d) {
  for (uint64_t i = a + 1; i <= kSigma; i += i & (~i + 1)) fenwick_[i] += d;
}

void text_collection::add_symbol(uint64_t row, uint64_t a) {
  seq_.insert(row, a);
  bump(a, 1);
}

size_t text_collection::order_of(uint64_t id) const {
  auto it = std::find_if(docs_.begin(), docs_.end(), [&](const doc& d) { return d.id == id; });
  if (it == docs_.end()) fail(errc::not_found, "no document " + std::to_string(id));
  return static_cast<size_t>(it - docs_.begin());
}

uint64_t text_collection::lf(uint64_t p) const {
  const uint64_t c = seq_.access(p);
  return smaller(c) + seq_.rank(c, p);
}

uint64_t text_collection::insert(std::string_view text) {
  if (text.empty()) fail(errc::out_of_range, "empty document");
  const uint64_t m = text.size();
  // Row of the new document's terminator rotation, last among terminators.
  uint64_t p = docs_.size() + 1;
  add_symbol(p, sym(text[m - 1]));
  if (hook_) hook_(*this, m + 1, p);
  for (uint64_t j = m; j >= 1; --j) {
    const uint64_t c = sym(text[j - 1]);
    // The pending terminator of this document is not stored yet.
    const uint64_t q = smaller(c) + 1 + seq_.rank(c, p);
    add_symbol(q, j > 1 ? sym(text[j - 2]) : kTerminator);
    p = q;
    if (hook_) hook_(*this, j, p);
  }
  docs_.push_back({next_id_, m});
  return next_id_++;
}

void text_collection::erase(uint64_t id) {
  const size_t o = order_of(id);
  std::vector<uint64_t> rows;
  rows.reserve(docs_[o].len + 1);
  uint64_t p = o + 1;
  for (;;) {
    rows.push_back(p);
    const uint64_t c = seq_.access(p);
    if (c == kTerminator) break;
    p = smaller(c) + seq_.rank(c, p);
  }
  if (rows.size() != docs_[o].len + 1) fail(errc::invariant, "document walk has the wrong length");
  std::sort(rows.begin(), rows.end(), std::greater<>());
  for (uint64_t r : rows) {
    bump(seq_.access(r), -1);
    seq_.erase(r);
  }
  docs_.erase(docs_.begin() + static_cast<std::ptrdiff_t>(o));
}

uint64_t text_collection::count(std::string_view pattern) const {
  if (pattern.empty()) fail(errc::out_of_range, "empty pattern");
  uint64_t sp = 1, ep = rows();
  for (size_t k = pattern.size(); k-- > 0 && sp <= ep;) {
    const uint64_t c = sym(pattern[k]);
    if (seq_.alphabet().count(c) == 0) return 0;
    const uint64_t base = smaller(c);
    sp = base + seq_.rank(c, sp - 1) + 1;
    ep = base + seq_.rank(c, ep);
  }
  return sp <= ep ? ep - sp + 1 : 0;
}

std::string text_collection::extract(uint64_t id, uint64_t l, uint64_t r) const {
  const size_t o = order_of(id);
  const uint64_t m = docs_[o].len;
  if (l < 1 || l > r || r > m) fail(errc::out_of_range, "bad range for document " + std::to_string(id));
  std::string out(r - l + 1, '\0');
  uint64_t p = o + 1;
  for (uint64_t k = m; k >= l; --k) {
    const uint64_t c = seq_.access(p);
    if (k <= r) out[k - l] = static_cast<char>(c - 1);
    if (k == l) break;
    p = smaller(c) + seq_.rank(c, p);
  }
  return out;
}

std::string text_collection::document(uint64_t id) const { return extract(id, 1, length(id)); }

uint64_t text_collection::length(uint64_t id) const { return docs_[order_of(id)].len; }

std::vector<uint64_t> text_collection::documents() const {
  std::vector<uint64_t> out;
  for (const doc& d : docs_) out.push_back(d.id);
  return out;
}

std::string text_collection::bwt() const {
  const auto v = seq_.to_vector();
  std::string out(v.size(), '$');
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] != kTerminator) out[i] = static_cast<char>(v[i] - 1);
  return out;
}

void text_collection::audit(bool full) const {
  seq_.audit();
  for (uint64_t a = 0; a < kSigma; ++a)
    if (smaller(a + 1) - smaller(a) != seq_.alphabet().count(a))
      fail(errc::invariant, "symbol count cache disagrees for symbol " + std::to_string(a));
  uint64_t total = docs_.size();
  for (const doc& d : docs_) total += d.len;
  if (total != rows()) fail(errc::invariant, "document lengths disagree with the sequence");
  if (seq_.alphabet().count(kTerminator) != docs_.size())
    fail(errc::invariant, "terminator count disagrees with documents");
  if (!full) return;
  std::vector<bool> seen(rows() + 1, false);
  for (uint64_t p = 1; p <= rows(); ++p) {
    const uint64_t q = lf(p);
    if (q < 1 || q > rows() || seen[q]) fail(errc::invariant, "LF is not a permutation");
    seen[q] = true;
  }
}

void text_collection::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put(out, next_id_);
  put(out, docs_.size());
  for (const doc& d : docs_) {
    put(out, d.id);
    put(out, d.len);
  }
  seq_.save(out);
}

text_collection text_collection::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    fail(errc::bad_format, "not a saved collection");
  const uint64_t next = get(in);
  const uint64_t k = get(in);
  if (k > next) fail(errc::bad_format, "bad document count");
  std::vector<doc> docs;
  for (uint64_t i = 0; i < k; ++i) {
    const uint64_t id = get(in);
    const uint64_t len = get(in);
    if (id >= next || len == 0 || (!docs.empty() && id <= docs.back().id))
      fail(errc::bad_format, "bad document entry");
    docs.push_back({id, len});
  }
  wavelet_tree seq = wavelet_tree::load(in);
  if (seq.config().sigma != kSigma) fail(errc::bad_format, "sequence is not over bytes");
  text_collection t(seq.config());
  t.seq_ = std::move(seq);
  t.docs_ = std::move(docs);
  t.next_id_ = next;
  for (uint64_t a = 0; a < kSigma; ++a)
    if (const uint64_t c = t.seq_.alphabet().count(a)) t.bump(a, static_cast<int64_t>(c));
  try {
    t.audit(false);
  } catch (const error& e) {
    fail(errc::bad_format, std::string("inconsistent collection: ") + e.what());
  }
  return t;
}

std::string bwt_build(std::string_view text, text_collection::step_hook on_step) {
  if (text.empty()) fail(errc::out_of_range, "empty text");
  text_collection c;
  c.set_step_hook(std::move(on_step));
  c.insert(text);
  return c.bwt();
}

}  // namespace dynwt
