// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynwt/chunk_codec.hpp"
#include "dynwt/errors.hpp"
#include "dynwt/text_collection.hpp"
#include "dynwt/wavelet_tree.hpp"
#include "dynwt/workload.hpp"

using namespace dynwt;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<outcome()>& body) {
  const auto t0 = clock_type::now();
  outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  if (!r.ok) ++failures;
  std::printf("%s %s: %s (%.1fs)\n", r.ok ? "PASS" : "FAIL", name, r.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

// ---- oracles --------------------------------------------------------------

// Suffix array of text followed by a sentinel smaller than every byte, by
// prefix doubling.
std::vector<uint32_t> suffix_array(const std::string& text) {
  const uint32_t n = static_cast<uint32_t>(text.size()) + 1;
  std::vector<uint32_t> sa(n), rank(n), tmp(n);
  for (uint32_t i = 0; i < n; ++i) {
    sa[i] = i;
    rank[i] = i + 1 < n ? static_cast<unsigned char>(text[i]) + 1u : 0u;
  }
  for (uint32_t k = 1;; k <<= 1) {
    auto key = [&](uint32_t i) { return std::pair<uint32_t, int64_t>(rank[i], i + k < n ? rank[i + k] : -1); };
    std::sort(sa.begin(), sa.end(), [&](uint32_t a, uint32_t b) { return key(a) < key(b); });
    tmp[sa[0]] = 0;
    for (uint32_t i = 1; i < n; ++i) tmp[sa[i]] = tmp[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
    rank.swap(tmp);
    if (rank[sa[n - 1]] == n - 1) break;
  }
  return sa;
}

std::string oracle_bwt(const std::string& text) {
  const auto sa = suffix_array(text);
  std::string out(sa.size(), '$');
  for (size_t i = 0; i < sa.size(); ++i)
    if (sa[i] > 0) out[i] = text[sa[i] - 1];
  return out;
}

uint64_t naive_count(const std::vector<std::string>& docs, const std::string& p) {
  uint64_t n = 0;
  for (const auto& d : docs)
    for (size_t at = d.find(p); at != std::string::npos; at = d.find(p, at + 1)) ++n;
  return n;
}

// Half the patterns are substrings of the corpus, half are random.
std::vector<std::string> patterns(const std::vector<std::string>& docs, uint32_t sigma, std::mt19937_64& rng,
                                  int count) {
  std::vector<std::string> out;
  for (int k = 0; k < count; ++k) {
    const size_t len = 1 + rng() % 8;
    if (k % 2 == 0) {
      const std::string& d = docs[rng() % docs.size()];
      const size_t l = std::min(len, d.size());
      out.push_back(d.substr(rng() % (d.size() - l + 1), l));
    } else {
      std::string p(len, 'a');
      for (auto& c : p) c = static_cast<char>(sigma >= 256 ? rng() % 256 : 'a' + rng() % sigma);
      out.push_back(p);
    }
  }
  return out;
}

std::string random_text(std::mt19937_64& rng, size_t len, uint32_t sigma) {
  std::string s(len, 'a');
  for (auto& c : s) c = static_cast<char>(sigma >= 256 ? rng() % 256 : 'a' + rng() % sigma);
  return s;
}

double entropy(const std::vector<uint64_t>& v) {
  std::map<uint64_t, double> f;
  for (uint64_t a : v) f[a] += 1;
  double h = 0;
  const double n = static_cast<double>(v.size());
  for (const auto& [a, c] : f) h += c / n * std::log2(n / c);
  return h;
}

// ---- criteria ---------------------------------------------------------------

outcome oracle_equivalence() {
  uint64_t runs = 0, audits = 0;
  const auto t0 = clock_type::now();
  for (uint64_t sigma : {2, 16, 256, 4096})
    for (uint64_t seed : {1, 2, 3}) {
      selftest_options o;
      o.ops = 100000;
      o.sigma = sigma;
      o.seed = seed;
      o.checkpoint = 1000;
      o.mix = {0.4, 0.1, 0.5 / 3, 0.5 / 3, 0.5 / 3};
      const selftest_result r = run_selftest(o);
      if (!r.ok)
        return {false, "sigma=" + std::to_string(sigma) + " seed=" + std::to_string(seed) + " " + r.divergence};
      ++runs;
      audits += r.audits;
    }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << runs << " runs of 1e5 ops, " << audits << " audits, 0 divergences, " << secs << "s";
  return {secs < 300, d.str()};
}

std::vector<std::pair<std::vector<uint8_t>, uint64_t>> lex_runs(uint32_t rho, uint32_t b) {
  std::vector<std::pair<std::vector<uint8_t>, uint64_t>> out;
  std::map<std::vector<uint8_t>, uint64_t> next;
  std::vector<uint8_t> run(b, 0);
  for (;;) {
    std::vector<uint8_t> hist(rho, 0);
    for (uint8_t d : run) ++hist[d];
    out.emplace_back(run, next[hist]++);
    int k = static_cast<int>(b) - 1;
    while (k >= 0 && run[k] == rho - 1) run[k--] = 0;
    if (k < 0) break;
    ++run[k];
  }
  return out;
}

outcome chunk_codec() {
  uint64_t checked = 0;
  for (uint32_t rho = 2; rho <= 4; ++rho)
    for (uint32_t b = 1; b <= 8; ++b) {
      std::map<std::vector<uint8_t>, std::vector<bool>> hit;
      for (const auto& [run, want] : lex_runs(rho, b)) {
        const chunk c = encode_chunk(run, rho);
        if (c.offset != want || decode_chunk(c) != run)
          return {false, "rho=" + std::to_string(rho) + " b=" + std::to_string(b) + " roundtrip"};
        auto& seen = hit[c.cls.counts];
        if (seen.empty()) seen.assign(multinomial(c.cls.counts), false);
        if (c.offset >= seen.size() || seen[c.offset]) return {false, "offset collision"};
        seen[c.offset] = true;
        ++checked;
      }
      for (const auto& [cls, seen] : hit)
        if (std::count(seen.begin(), seen.end(), false)) return {false, "offset gap"};
    }
  return {true, std::to_string(checked) + " chunks, offsets bijective per class"};
}

outcome bwt_correctness() {
  std::mt19937_64 rng(2024);
  uint64_t counted = 0;
  auto check_counts = [&](const text_collection& c, const std::vector<std::string>& docs, uint32_t sigma) {
    for (const std::string& p : patterns(docs, sigma, rng, 100)) {
      if (c.count(p) != naive_count(docs, p)) return false;
      ++counted;
    }
    return true;
  };

  const std::string banana = "banana";
  if (bwt_build(banana) != "annb$aa" || oracle_bwt(banana) != "annb$aa") return {false, "banana"};
  {
    text_collection c;
    c.insert(banana);
    if (!check_counts(c, {banana}, 3)) return {false, "banana count"};
  }

  std::vector<std::string> docs;
  text_collection all;
  for (int k = 0; k < 1000; ++k) {
    const uint32_t sigma = k % 3 == 0 ? 2 : k % 3 == 1 ? 4 : 256;
    const std::string t = random_text(rng, 1 + rng() % 200, sigma);
    if (bwt_build(t) != oracle_bwt(t)) return {false, "random string " + std::to_string(k)};
    docs.push_back(t);
    all.insert(t);
  }
  if (!check_counts(all, docs, 4)) return {false, "count over the random strings"};

  const symbol_source zipf(256, 1.0);
  std::string big(1 << 20, '\0');
  for (auto& ch : big) ch = static_cast<char>(zipf(rng));
  const auto t0 = clock_type::now();
  bool counts_ok = false;
  const std::string got = bwt_build(big, [&](const text_collection& c, uint64_t start, uint64_t) {
    if (start == 1) counts_ok = check_counts(c, {big}, 256);
  });
  const double build_secs = seconds_since(t0);
  if (got != oracle_bwt(big)) return {false, "1 MiB zipfian BWT differs"};
  if (!counts_ok) return {false, "count over the 1 MiB corpus"};
  std::ostringstream d;
  d << "banana, 1000 random strings, 1 MiB zipfian (" << build_secs << "s build) match; " << counted
    << " patterns counted";
  return {true, d.str()};
}

outcome space_accounting() {
  const uint64_t n = 1000000;
  std::mt19937_64 rng(77);
  const symbol_source zipf(256, 1.0);
  std::vector<uint64_t> v(n);
  for (auto& a : v) a = zipf(rng);
  tree_config cfg;
  cfg.sigma = 256;
  const wavelet_tree t = wavelet_tree::build_from(v, cfg);
  const tree_stats s = t.stats();
  const double h0 = entropy(v);
  const double bound = static_cast<double>(n) * h0 + static_cast<double>(s.chunks);
  const double total_bound = 8.0 * static_cast<double>(n) * std::log2(256.0);
  std::ostringstream d;
  d << "offset bits " << s.payload_offset_bits << " <= nH0+chunks " << static_cast<uint64_t>(bound)
    << "; total bits " << s.total_bits << " (" << static_cast<double>(s.total_bits) / n << "/symbol) <= "
    << static_cast<uint64_t>(total_bound);
  return {s.n == n && static_cast<double>(s.payload_offset_bits) <= bound &&
              static_cast<double>(s.total_bits) <= total_bound,
          d.str()};
}

// Fixed query set derived from a seed; answers are recorded in order.
std::vector<uint64_t> fixed_queries(const wavelet_tree& t, uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<uint64_t> out;
  const uint64_t n = t.size();
  for (int q = 0; q < count; ++q) {
    const uint64_t i = 1 + rng() % n;
    switch (q % 3) {
      case 0:
        out.push_back(t.access(i));
        break;
      case 1:
        out.push_back(t.rank(rng() % 64, i));
        break;
      default: {
        const uint64_t a = t.access(i);
        out.push_back(t.select(a, t.rank(a, i)));
      }
    }
  }
  return out;
}

outcome lazy_deletion() {
  tree_config cfg;
  cfg.sigma = 64;
  wavelet_tree t(cfg);
  std::vector<uint64_t> before, after;
  uint64_t dels_before = 0;
  bool clean_state = false;
  int cleans = 0;
  t.set_clean_hook([&](const wavelet_tree& w, bool pre) {
    if (cleans > 0) return;
    if (pre) {
      dels_before = w.deleted();
      before = fixed_queries(w, 5, 10000);
    } else {
      after = fixed_queries(w, 5, 10000);
      clean_state = w.deleted() == 0 && w.stored_size() == w.size();
      ++cleans;
    }
  });
  std::mt19937_64 rng(9);
  std::vector<uint64_t> v;
  for (int i = 0; i < 20000; ++i) {
    const uint64_t p = 1 + rng() % (v.size() + 1), a = rng() % 64;
    t.insert(p, a);
    v.insert(v.begin() + static_cast<std::ptrdiff_t>(p - 1), a);
  }
  while (cleans == 0) {
    const uint64_t p = 1 + rng() % v.size();
    t.erase(p);
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(p - 1));
  }
  t.audit();
  const bool same = !before.empty() && before == after;
  std::ostringstream d;
  d << "clean expunged " << dels_before << " symbols at n=" << t.size() << "; 10000 answers "
    << (same ? "identical" : "differ") << "; DEL empty and stored length = n after: "
    << (clean_state ? "yes" : "no");
  return {same && clean_state && t.to_vector() == v, d.str()};
}

outcome navigation() {
  uint64_t checks = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    tree_config cfg;
    cfg.sigma = 1 + rng() % 300;
    wavelet_tree t(cfg);
    // Stored sequence with alive flags, kept independently.
    std::vector<std::pair<uint64_t, bool>> stored;
    uint64_t epoch = 0;
    auto sync = [&] {
      if (t.cleanings() + t.rebuilds() == epoch) return;
      epoch = t.cleanings() + t.rebuilds();
      std::erase_if(stored, [](const auto& e) { return !e.second; });
    };
    auto nth_alive = [&](uint64_t i) {
      size_t at = 0;
      for (;; ++at)
        if (stored[at].second && --i == 0) return at;
    };
    for (int k = 0; k < 12000; ++k) {
      const uint64_t alive = t.size();
      if (k >= 10000 || (alive > 0 && rng() % 10 == 0)) {
        const uint64_t i = 1 + rng() % alive;
        stored[nth_alive(i)].second = false;
        t.erase(i);
      } else {
        const uint64_t i = 1 + rng() % (alive + 1);
        const uint64_t a = rng() % cfg.sigma;
        const size_t at = i > alive ? stored.size() : nth_alive(i);
        stored.insert(stored.begin() + static_cast<std::ptrdiff_t>(at), {a, true});
        t.insert(i, a);
      }
      sync();
    }

    // Reconstruction from the node chains alone.
    const auto slots = t.reconstruct();
    if (slots.size() != stored.size()) return {false, "seed " + std::to_string(seed) + ": reconstruct length"};
    for (size_t k = 0; k < slots.size(); ++k)
      if (stored[k].second && t.alphabet().symbol_of(slots[k]) != stored[k].first)
        return {false, "seed " + std::to_string(seed) + ": reconstruct content"};

    // ascend . descend = id, and the child index is the rank of the digit.
    std::map<node_key, std::vector<uint64_t>> rank_before;
    auto ranks = [&](node_key key) -> const std::vector<uint64_t>& {
      auto it = rank_before.find(key);
      if (it != rank_before.end()) return it->second;
      const auto digs = t.node_digits(key);
      std::vector<uint64_t> r(digs.size());
      std::vector<uint64_t> seen(t.params().rho, 0);
      for (size_t x = 0; x < digs.size(); ++x) r[x] = seen[digs[x]]++;
      return rank_before[key] = std::move(r);
    };
    for (uint64_t i = 1; i <= t.size(); ++i) {
      position q = t.root_position(i);
      for (uint32_t d = 0; d < t.height(); ++d) {
        const uint64_t x = t.chain_index(q);
        const auto& r = ranks(t.node_of(q));
        const uint32_t dig = t.digit_at(q);
        const position c = t.descend(q, dig);
        if (!(t.ascend(c) == q)) return {false, "seed " + std::to_string(seed) + ": ascend(descend(p)) != p"};
        if (t.chain_index(c) != r[x - 1] + 1) return {false, "seed " + std::to_string(seed) + ": child index"};
        q = c;
        ++checks;
      }
      if (!t.is_alive(q)) return {false, "leaf element not alive"};
    }
  }
  return {true, std::to_string(checks) + " descend/ascend steps over 20 seeds, reconstruction exact"};
}

outcome w_rebuild() {
  tree_config cfg;
  cfg.sigma = 1000;
  cfg.min_w = 8;
  wavelet_tree t(cfg);
  std::mt19937_64 rng(31);
  std::vector<uint64_t> v;
  const uint32_t w0 = t.params().w;
  uint64_t seen_rebuilds = 0, checks = 0;
  auto full = [&] {
    t.audit();
    return t.to_vector() == v;
  };
  for (int k = 0; k < 10; ++k) {
    const uint64_t a = rng() % cfg.sigma;
    t.insert(1 + k, a);
    v.push_back(a);
  }
  while (v.size() <= 70000) {
    if (rng() % 10 == 0) {
      const uint64_t i = 1 + rng() % v.size();
      t.erase(i);
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i - 1));
    } else {
      const uint64_t i = 1 + rng() % (v.size() + 1), a = rng() % cfg.sigma;
      t.insert(i, a);
      v.insert(v.begin() + static_cast<std::ptrdiff_t>(i - 1), a);
    }
    const uint64_t i = 1 + rng() % v.size();
    if (t.access(i) != v[i - 1]) return {false, "access diverged at n=" + std::to_string(v.size())};
    if (++checks % 64 == 0) {
      const uint64_t a = v[i - 1];
      const uint64_t r = static_cast<uint64_t>(std::count(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i), a));
      if (t.rank(a, i) != r || t.select(a, r) != i) return {false, "rank/select diverged"};
    }
    if (t.rebuilds() != seen_rebuilds) {
      seen_rebuilds = t.rebuilds();
      if (!full()) return {false, "content differs after rebuild " + std::to_string(seen_rebuilds)};
    }
  }
  if (!full()) return {false, "final content differs"};
  std::ostringstream d;
  d << "n=" << v.size() << ", w " << w0 << " -> " << t.params().w << ", " << t.rebuilds() << " rebuilds";
  return {w0 == 8 && t.rebuilds() >= 2 && v.size() > 65536, d.str()};
}

outcome scaling() {
  workload wl;
  wl.ops = 200000;
  wl.sigma = 256;
  wl.seed = 5;
  wl.mix = {0.4, 0.1, 0.5 / 3, 0.5 / 3, 0.5 / 3};
  wl.sizes = {uint64_t{1} << 16, uint64_t{1} << 20};
  const auto rows = run_bench(wl);
  std::ofstream csv("acceptance_bench.csv");
  write_bench_csv(csv, rows);
  const double ratio = rows[1].ns_per_op / rows[0].ns_per_op;
  std::ostringstream d;
  d << rows[0].ns_per_op << " ns/op at 2^16, " << rows[1].ns_per_op << " ns/op at 2^20, ratio " << ratio
    << " (acceptance_bench.csv)";
  return {ratio <= 8, d.str()};
}

}  // namespace

int main() {
  report("oracle-equivalence", oracle_equivalence);
  report("chunk-codec", chunk_codec);
  report("bwt-correctness", bwt_correctness);
  report("space-accounting", space_accounting);
  report("lazy-deletion", lazy_deletion);
  report("navigation-identities", navigation);
  report("w-rebuild", w_rebuild);
  report("scaling", scaling);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
