#pragma once

// Randomized operation streams: the oracle-checked self test and the
// timing benchmark behind the command line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dynwt/wavelet_tree.hpp"

namespace dynwt {

struct op_mix {
  double insert = 0.4;
  double erase = 0.1;
  double access = 0.5 / 3;
  double rank = 0.5 / 3;
  double select = 0.5 / 3;
};

struct workload {
  op_mix mix;
  uint64_t ops = 100000;
  uint64_t sigma = 256;
  double zipf = 0;  // 0 draws symbols uniformly
  uint64_t seed = 1;
  std::vector<uint64_t> sizes;  // bench only: starting lengths

  /// Parses "key=value,..." with keys ops, sigma, seed, dist (uniform or
  /// zipf:S), mix (insert/delete/query percentages), insert, delete,
  /// access, rank, select and sizes (colon separated). Weights are
  /// normalized to sum to 1.
  static workload parse(const std::string& spec);
};

/// Draws symbols in [0, sigma), uniformly or with Zipf weights 1/r^s.
class symbol_source {
 public:
  symbol_source(uint64_t sigma, double zipf);
  uint64_t operator()(std::mt19937_64& rng) const;

 private:
  uint64_t sigma_;
  std::vector<double> cdf_;
};

struct selftest_options {
  uint64_t ops = 100000;
  uint64_t sigma = 256;
  uint64_t seed = 42;
  uint64_t checkpoint = 1000;
  op_mix mix;
  tree_config config;
  /// Corrupts the oracle's answer at this op, for negative controls.
  std::optional<uint64_t> fault_at;
};

struct selftest_result {
  bool ok = true;
  uint64_t ops_done = 0;
  uint64_t final_size = 0;
  uint64_t audits = 0;
  uint64_t rebuilds = 0;
  uint64_t cleanings = 0;
  uint32_t max_w = 0;
  std::string divergence;  // empty when ok
};

/// Runs the random stream against a vector oracle, comparing every answer
/// and auditing the structure every `checkpoint` ops.
selftest_result run_selftest(const selftest_options& opt);

struct bench_row {
  std::string op;
  uint64_t n = 0;
  uint64_t sigma = 0;
  double ns_per_op = 0;
  double bits_per_symbol = 0;
};

/// One mixed-workload row per starting size.
std::vector<bench_row> run_bench(const workload& wl);
void write_bench_csv(std::ostream& out, const std::vector<bench_row>& rows);

}  // namespace dynwt
