#include "dynwt/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "dynwt/errors.hpp"

namespace dynwt {
namespace {

uint64_t parse_u64(const std::string& key, const std::string& v) {
  size_t used = 0;
  uint64_t x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) fail(errc::out_of_range, "bad value for " + key + ": " + v);
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !(x >= 0)) fail(errc::out_of_range, "bad value for " + key + ": " + v);
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

void normalize(op_mix& m) {
  const double s = m.insert + m.erase + m.access + m.rank + m.select;
  if (!(s > 0)) fail(errc::out_of_range, "operation weights sum to zero");
  m.insert /= s;
  m.erase /= s;
  m.access /= s;
  m.rank /= s;
  m.select /= s;
}

enum class op_kind { insert, erase, access, rank, select };

op_kind draw_op(const op_mix& m, std::mt19937_64& rng, bool empty) {
  double u = std::uniform_real_distribution<double>(0, 1)(rng);
  if (empty) return op_kind::insert;
  if ((u -= m.insert) < 0) return op_kind::insert;
  if ((u -= m.erase) < 0) return op_kind::erase;
  if ((u -= m.access) < 0) return op_kind::access;
  if ((u -= m.rank) < 0) return op_kind::rank;
  return op_kind::select;
}

uint64_t uniform(std::mt19937_64& rng, uint64_t lo, uint64_t hi) {
  return std::uniform_int_distribution<uint64_t>(lo, hi)(rng);
}

}  // namespace

workload workload::parse(const std::string& spec) {
  workload wl;
  op_mix m{0, 0, 0, 0, 0};
  bool weights = false;
  for (const std::string& item : split(spec, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string::npos) fail(errc::out_of_range, "expected key=value: " + item);
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (key == "ops") {
      wl.ops = parse_u64(key, val);
    } else if (key == "sigma") {
      wl.sigma = parse_u64(key, val);
      if (wl.sigma == 0) fail(errc::out_of_range, "sigma must be positive");
    } else if (key == "seed") {
      wl.seed = parse_u64(key, val);
    } else if (key == "dist") {
      if (val == "uniform")
        wl.zipf = 0;
      else if (val.rfind("zipf:", 0) == 0)
        wl.zipf = parse_double(key, val.substr(5));
      else
        fail(errc::out_of_range, "unknown distribution " + val);
    } else if (key == "mix") {
      const auto p = split(val, '/');
      if (p.size() != 3) fail(errc::out_of_range, "mix needs insert/delete/query");
      m.insert = parse_double(key, p[0]);
      m.erase = parse_double(key, p[1]);
      m.access = m.rank = m.select = parse_double(key, p[2]) / 3;
      weights = true;
    } else if (key == "insert" || key == "delete" || key == "access" || key == "rank" || key == "select") {
      const double x = parse_double(key, val);
      (key == "insert" ? m.insert
       : key == "delete" ? m.erase
       : key == "access" ? m.access
       : key == "rank"   ? m.rank
                         : m.select) = x;
      weights = true;
    } else if (key == "sizes") {
      for (const std::string& s : split(val, ':')) wl.sizes.push_back(parse_u64(key, s));
    } else {
      fail(errc::out_of_range, "unknown workload key " + key);
    }
  }
  if (weights) wl.mix = m;
  normalize(wl.mix);
  return wl;
}

symbol_source::symbol_source(uint64_t sigma, double zipf) : sigma_(sigma) {
  if (sigma == 0) fail(errc::out_of_range, "sigma must be positive");
  if (zipf <= 0) return;
  if (sigma > (uint64_t{1} << 24)) fail(errc::unsupported, "zipf alphabet too large");
  cdf_.resize(sigma);
  double s = 0;
  for (uint64_t r = 0; r < sigma; ++r) cdf_[r] = s += 1.0 / std::pow(static_cast<double>(r + 1), zipf);
  for (double& c : cdf_) c /= s;
}

uint64_t symbol_source::operator()(std::mt19937_64& rng) const {
  if (cdf_.empty()) return uniform(rng, 0, sigma_ - 1);
  const double u = std::uniform_real_distribution<double>(0, 1)(rng);
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<uint64_t>(static_cast<uint64_t>(it - cdf_.begin()), sigma_ - 1);
}

selftest_result run_selftest(const selftest_options& opt) {
  selftest_result res;
  op_mix mix = opt.mix;
  normalize(mix);
  tree_config cfg = opt.config;
  cfg.sigma = opt.sigma;
  wavelet_tree t(cfg);
  std::vector<uint64_t> oracle;
  std::mt19937_64 rng(opt.seed);
  const symbol_source draw(opt.sigma, 0);

  auto diverge = [&](uint64_t op, const std::string& what) {
    res.ok = false;
    res.divergence = "op " + std::to_string(op) + ": " + what;
  };
  auto full_check = [&](uint64_t op) {
    try {
      t.audit();
    } catch (const error& e) {
      diverge(op, std::string("audit failed: ") + e.what());
      return;
    }
    ++res.audits;
    if (t.to_vector() != oracle) diverge(op, "content differs from the oracle");
  };

  for (uint64_t op = 1; op <= opt.ops && res.ok; ++op) {
    const op_kind kind = draw_op(mix, rng, oracle.empty());
    const bool fault = opt.fault_at && *opt.fault_at == op;
    try {
      switch (kind) {
        case op_kind::insert: {
          const uint64_t i = uniform(rng, 1, oracle.size() + 1);
          const uint64_t a = draw(rng);
          t.insert(i, a);
          oracle.insert(oracle.begin() + static_cast<std::ptrdiff_t>(i - 1), fault ? a + 1 : a);
          if (t.size() != oracle.size()) diverge(op, "length after insert(" + std::to_string(i) + ")");
          break;
        }
        case op_kind::erase: {
          const uint64_t i = uniform(rng, 1, oracle.size());
          t.erase(i);
          oracle.erase(oracle.begin() + static_cast<std::ptrdiff_t>(i - 1));
          if (t.size() != oracle.size()) diverge(op, "length after erase(" + std::to_string(i) + ")");
          break;
        }
        case op_kind::access: {
          const uint64_t i = uniform(rng, 1, oracle.size());
          const uint64_t want = oracle[i - 1] + (fault ? 1 : 0);
          const uint64_t got = t.access(i);
          if (got != want)
            diverge(op, "access(" + std::to_string(i) + ") = " + std::to_string(got) + ", expected " +
                            std::to_string(want));
          break;
        }
        case op_kind::rank: {
          // Mostly symbols present in the sequence, sometimes any symbol.
          const uint64_t a = uniform(rng, 0, 3) ? oracle[uniform(rng, 0, oracle.size() - 1)] : draw(rng);
          const uint64_t i = uniform(rng, 0, oracle.size());
          const uint64_t want =
              static_cast<uint64_t>(std::count(oracle.begin(), oracle.begin() + static_cast<std::ptrdiff_t>(i), a)) +
              (fault ? 1 : 0);
          const uint64_t got = t.rank(a, i);
          if (got != want)
            diverge(op, "rank(" + std::to_string(a) + ", " + std::to_string(i) + ") = " + std::to_string(got) +
                            ", expected " + std::to_string(want));
          break;
        }
        case op_kind::select: {
          const uint64_t a = oracle[uniform(rng, 0, oracle.size() - 1)];
          const uint64_t total = static_cast<uint64_t>(std::count(oracle.begin(), oracle.end(), a));
          const uint64_t k = uniform(rng, 1, total);
          uint64_t want = 0;
          for (uint64_t seen = 0; want < oracle.size();)
            if (oracle[want++] == a && ++seen == k) break;
          if (fault) ++want;
          const uint64_t got = t.select(a, k);
          if (got != want)
            diverge(op, "select(" + std::to_string(a) + ", " + std::to_string(k) + ") = " + std::to_string(got) +
                            ", expected " + std::to_string(want));
          break;
        }
      }
    } catch (const error& e) {
      diverge(op, std::string("unexpected error: ") + e.what());
    }
    res.ops_done = op;
    res.max_w = std::max(res.max_w, t.params().w);
    if (res.ok && opt.checkpoint && op % opt.checkpoint == 0) full_check(op);
  }
  if (res.ok) full_check(res.ops_done);
  res.final_size = t.size();
  res.rebuilds = t.rebuilds();
  res.cleanings = t.cleanings();
  return res;
}

std::vector<bench_row> run_bench(const workload& wl) {
  std::vector<bench_row> rows;
  if (wl.ops == 0) return rows;
  std::vector<uint64_t> sizes = wl.sizes;
  if (sizes.empty()) sizes.push_back(uint64_t{1} << 16);
  const symbol_source draw(wl.sigma, wl.zipf);
  for (uint64_t n : sizes) {
    std::mt19937_64 rng(wl.seed ^ (n * 0x9e3779b97f4a7c15ull));
    std::vector<uint64_t> init(n);
    for (auto& a : init) a = draw(rng);
    tree_config cfg;
    cfg.sigma = wl.sigma;
    wavelet_tree t = wavelet_tree::build_from(init, cfg);

    // Draw the stream first so timing covers only the structure.
    struct step {
      op_kind kind;
      uint64_t a, i;
    };
    std::vector<step> stream;
    stream.reserve(wl.ops);
    uint64_t len = n;
    for (uint64_t k = 0; k < wl.ops; ++k) {
      const op_kind kind = draw_op(wl.mix, rng, len == 0);
      step s{kind, draw(rng), 0};
      switch (kind) {
        case op_kind::insert:
          s.i = uniform(rng, 1, len + 1);
          ++len;
          break;
        case op_kind::erase:
          s.i = uniform(rng, 1, len);
          --len;
          break;
        case op_kind::access:
          s.i = uniform(rng, 1, len);
          break;
        case op_kind::rank:
          s.i = uniform(rng, 0, len);
          break;
        case op_kind::select:
          s.i = uniform(rng, 1, len);  // picks the symbol at i, then a random occurrence
          break;
      }
      stream.push_back(s);
    }

    uint64_t sink = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const step& s : stream) {
      switch (s.kind) {
        case op_kind::insert:
          t.insert(s.i, s.a);
          break;
        case op_kind::erase:
          t.erase(s.i);
          break;
        case op_kind::access:
          sink += t.access(s.i);
          break;
        case op_kind::rank:
          sink += t.rank(s.a, s.i);
          break;
        case op_kind::select: {
          const uint64_t a = t.access(s.i);
          const uint64_t k = t.rank(a, s.i);
          sink += t.select(a, k);
          break;
        }
      }
    }
    const auto stop = std::chrono::steady_clock::now();
    if (sink == 0xffffffffffffffffull) rows.clear();  // keeps the queries observable

    const tree_stats st = t.stats();
    bench_row r;
    r.op = "mixed";
    r.n = n;
    r.sigma = wl.sigma;
    r.ns_per_op = std::chrono::duration<double, std::nano>(stop - start).count() / static_cast<double>(wl.ops);
    r.bits_per_symbol =
        st.n ? static_cast<double>(st.payload_offset_bits + st.class_header_bits) / static_cast<double>(st.n) : 0;
    rows.push_back(r);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<bench_row>& rows) {
  out << "op,n,sigma,ns_per_op,bits_per_symbol\n";
  for (const bench_row& r : rows)
    out << r.op << ',' << r.n << ',' << r.sigma << ',' << r.ns_per_op << ',' << r.bits_per_symbol << '\n';
}

}  // namespace dynwt
