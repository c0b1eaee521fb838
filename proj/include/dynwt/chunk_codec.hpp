#pragma once

// Class/offset coding of short runs over a small alphabet [0, rho). A chunk
// is stored as its digit histogram (the class) plus the lexicographic rank
// of the run among all arrangements of that histogram (the offset).

#include <cstdint>
#include <span>
#include <vector>

namespace dynwt {

/// Longest chunk the codec accepts; 20! still fits in 64 bits.
inline constexpr uint32_t kMaxChunkSymbols = 20;
inline constexpr uint32_t kMaxArity = 64;

struct chunk_class {
  std::vector<uint8_t> counts;  // one counter per digit

  uint32_t length() const;
  uint32_t arity() const { return static_cast<uint32_t>(counts.size()); }
  bool operator==(const chunk_class&) const = default;
};

struct chunk {
  chunk_class cls;
  uint64_t offset = 0;

  bool operator==(const chunk&) const = default;
};

/// Number of distinct arrangements of a histogram.
uint64_t multinomial(std::span<const uint8_t> counts);

/// ceil(lg multinomial), zero when the class admits a single arrangement.
uint32_t offset_bit_width(std::span<const uint8_t> counts);
inline uint32_t offset_bit_width(const chunk_class& c) { return offset_bit_width(c.counts); }

chunk encode_chunk(std::span<const uint8_t> digits, uint32_t rho);
std::vector<uint8_t> decode_chunk(const chunk& c);

/// Decodes into `out`, which must hold cls.length() entries. Checks nothing
/// beyond the offset bound.
void decode_chunk_into(std::span<const uint8_t> counts, uint64_t offset, uint8_t* out);

/// Offset of `digits` given its (already known) histogram.
uint64_t chunk_offset(std::span<const uint8_t> digits, std::span<const uint8_t> counts);

/// Occurrences of digit t among the first i decoded digits.
uint32_t chunk_rank(const chunk& c, uint32_t t, uint32_t i);

}  // namespace dynwt
