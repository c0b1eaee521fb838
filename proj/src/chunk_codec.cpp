#include "dynwt/chunk_codec.hpp"

#include <array>

#include "dynwt/errors.hpp"
#include "dynwt/params.hpp"

namespace dynwt {
namespace {

constexpr std::array<uint64_t, kMaxChunkSymbols + 1> make_factorials() {
  std::array<uint64_t, kMaxChunkSymbols + 1> f{};
  f[0] = 1;
  for (uint32_t i = 1; i <= kMaxChunkSymbols; ++i) f[i] = f[i - 1] * i;
  return f;
}

constexpr auto kFactorial = make_factorials();

uint32_t total(std::span<const uint8_t> counts) {
  uint32_t b = 0;
  for (uint8_t c : counts) b += c;
  return b;
}

// Arrangements of the remaining histogram that start with a digit whose
// count is c, given m arrangements of the remaining `len` symbols.
inline uint64_t starting_with(uint64_t m, uint32_t c, uint32_t len) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(m) * c) / len);
}

}  // namespace

uint32_t chunk_class::length() const { return total(counts); }

uint64_t multinomial(std::span<const uint8_t> counts) {
  const uint32_t b = total(counts);
  if (b > kMaxChunkSymbols) fail(errc::overflow, "chunk longer than codec limit");
  uint64_t m = kFactorial[b];
  for (uint8_t c : counts) m /= kFactorial[c];
  return m;
}

uint32_t offset_bit_width(std::span<const uint8_t> counts) {
  return ceil_log2(multinomial(counts));
}

uint64_t chunk_offset(std::span<const uint8_t> digits, std::span<const uint8_t> counts) {
  std::array<uint8_t, kMaxArity> rem{};
  const uint32_t rho = static_cast<uint32_t>(counts.size());
  for (uint32_t t = 0; t < rho; ++t) rem[t] = counts[t];
  uint64_t m = multinomial(counts);
  uint32_t len = static_cast<uint32_t>(digits.size());
  uint64_t offset = 0;
  for (uint8_t d : digits) {
    for (uint32_t t = 0; t < d; ++t)
      if (rem[t]) offset += starting_with(m, rem[t], len);
    m = starting_with(m, rem[d], len);
    --rem[d];
    --len;
  }
  return offset;
}

chunk encode_chunk(std::span<const uint8_t> digits, uint32_t rho) {
  if (digits.empty()) fail(errc::empty_chunk, "cannot encode an empty chunk");
  if (rho < 2 || rho > kMaxArity) fail(errc::out_of_range, "arity must lie in [2, 64]");
  if (digits.size() > kMaxChunkSymbols) fail(errc::overflow, "chunk longer than codec limit");
  chunk c;
  c.cls.counts.assign(rho, 0);
  for (uint8_t d : digits) {
    if (d >= rho) fail(errc::invalid_digit, "digit " + std::to_string(d) + " >= arity");
    ++c.cls.counts[d];
  }
  c.offset = chunk_offset(digits, c.cls.counts);
  return c;
}

void decode_chunk_into(std::span<const uint8_t> counts, uint64_t offset, uint8_t* out) {
  std::array<uint8_t, kMaxArity> rem{};
  const uint32_t rho = static_cast<uint32_t>(counts.size());
  for (uint32_t t = 0; t < rho; ++t) rem[t] = counts[t];
  uint64_t m = multinomial(counts);
  if (offset >= m) fail(errc::corrupt_chunk, "offset exceeds class size");
  uint32_t len = total(counts);
  for (uint32_t pos = 0; len > 0; ++pos, --len) {
    for (uint32_t t = 0; t < rho; ++t) {
      if (!rem[t]) continue;
      const uint64_t here = starting_with(m, rem[t], len);
      if (offset < here) {
        out[pos] = static_cast<uint8_t>(t);
        m = here;
        --rem[t];
        break;
      }
      offset -= here;
    }
  }
}

std::vector<uint8_t> decode_chunk(const chunk& c) {
  std::vector<uint8_t> out(c.cls.length());
  decode_chunk_into(c.cls.counts, c.offset, out.data());
  return out;
}

uint32_t chunk_rank(const chunk& c, uint32_t t, uint32_t i) {
  const uint32_t b = c.cls.length();
  if (i > b) fail(errc::out_of_range, "prefix longer than chunk");
  if (t >= c.cls.arity()) fail(errc::invalid_digit, "digit >= arity");
  if (i == b) return c.cls.counts[t];
  const auto digits = decode_chunk(c);
  uint32_t r = 0;
  for (uint32_t k = 0; k < i; ++k) r += digits[k] == t;
  return r;
}

}  // namespace dynwt
