#include "dynwt/params.hpp"

#include <algorithm>
#include <cmath>

#include "dynwt/chunk_codec.hpp"
#include "dynwt/errors.hpp"

namespace dynwt {

const char* to_string(errc code) {
  switch (code) {
    case errc::invalid_digit: return "invalid digit";
    case errc::empty_chunk: return "empty chunk";
    case errc::corrupt_chunk: return "corrupt chunk";
    case errc::out_of_range: return "out of range";
    case errc::not_found: return "not found";
    case errc::double_delete: return "double delete";
    case errc::dangling_handle: return "dangling handle";
    case errc::duplicate_link: return "duplicate link";
    case errc::duplicate_id: return "duplicate id";
    case errc::unknown_block: return "unknown block";
    case errc::unsupported: return "unsupported";
    case errc::overflow: return "overflow";
    case errc::underflow: return "underflow";
    case errc::bad_format: return "bad format";
    case errc::io: return "io";
    case errc::invariant: return "invariant violated";
  }
  return "error";
}

uint32_t block_params::chunk_max() const {
  uint32_t b = (w / digit_bits()) / 2;
  return std::clamp<uint32_t>(b, 2, kMaxChunkSymbols);
}

uint32_t block_params::cap_symbols() const {
  return std::max<uint32_t>(8, cap_bits / digit_bits());
}

uint32_t block_params::mini_symbols() const {
  return std::max<uint32_t>(2 * chunk_max(), mini_bits / digit_bits());
}

block_params block_params::for_word(uint32_t w, rational epsilon, rational delta,
                                    uint32_t cap_override, uint32_t mini_override) {
  if (epsilon.den == 0 || delta.den == 0 ||
      uint64_t{epsilon.num} * delta.den + uint64_t{delta.num} * epsilon.den >=
          uint64_t{epsilon.den} * delta.den)
    fail(errc::unsupported, "tuning constants must satisfy epsilon + delta < 1");
  if (w < 2 || w > 64) fail(errc::out_of_range, "word exponent must lie in [2, 64]");

  block_params p;
  p.w = w;
  p.epsilon = epsilon;
  p.delta = delta;
  const double lgw = std::log2(static_cast<double>(w));
  const int rho_exp = static_cast<int>(std::floor(epsilon.value() * lgw + 1e-9));
  p.rho = std::clamp<uint32_t>(uint32_t{1} << std::clamp(rho_exp, 1, 6), 2, 64);
  const double tau = std::ceil(std::pow(static_cast<double>(w), delta.value()) - 1e-9);
  p.tau = std::clamp<uint32_t>(static_cast<uint32_t>(tau), 2, 64);
  p.cap_bits = cap_override ? cap_override : w * w * w;
  p.mini_bits = mini_override ? mini_override : 16 * w;
  return p;
}

}  // namespace dynwt
