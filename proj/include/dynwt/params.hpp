#pragma once

#include <cstdint>

namespace dynwt {

struct rational {
  uint32_t num = 1;
  uint32_t den = 2;

  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const rational&) const = default;
};

inline uint32_t ceil_log2(uint64_t x) {
  uint32_t r = 0;
  while (r < 64 && (uint64_t{1} << r) < x) ++r;
  return r;
}

/// Tuning of one block layout. All sizes derive from the fixed word
/// exponent `w`, which stays constant between full rebuilds.
struct block_params {
  uint32_t w = 8;
  uint32_t rho = 2;      // wavelet tree arity
  uint32_t tau = 2;      // arity of the in-block counting tree
  uint32_t cap_bits = 512;
  uint32_t mini_bits = 128;
  rational epsilon{1, 2};
  rational delta{2, 5};

  /// Bits of one raw digit.
  uint32_t digit_bits() const { return rho <= 2 ? 1 : ceil_log2(rho); }
  /// Largest chunk length b_max.
  uint32_t chunk_max() const;
  /// Nominal block length in symbols; blocks split at twice this.
  uint32_t cap_symbols() const;
  /// Nominal miniblock length in symbols.
  uint32_t mini_symbols() const;
  /// Width of one packed class counter.
  uint32_t class_counter_bits() const { return ceil_log2(uint64_t{chunk_max()} + 1); }

  /// Derives rho, tau and the default sizes from w. Overrides of zero keep
  /// the defaults cap_bits = w^3 and mini_bits = 16w.
  static block_params for_word(uint32_t w, rational epsilon, rational delta,
                               uint32_t cap_override = 0, uint32_t mini_override = 0);

  bool operator==(const block_params&) const = default;
};

}  // namespace dynwt
