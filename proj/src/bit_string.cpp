#include "dynwt/bit_string.hpp"

#include <bit>
#include <cassert>

namespace dynwt {

void bit_string::set(size_t pos, bool v) {
  const uint64_t mask = uint64_t{1} << (pos & 63);
  if (v)
    words_[pos >> 6] |= mask;
  else
    words_[pos >> 6] &= ~mask;
}

uint64_t bit_string::read(size_t pos, unsigned width) const {
  if (width == 0) return 0;
  assert(pos + width <= size_);
  const size_t w = pos >> 6;
  const unsigned off = pos & 63;
  uint64_t v = words_[w] >> off;
  if (off + width > 64) v |= words_[w + 1] << (64 - off);
  return width == 64 ? v : v & ((uint64_t{1} << width) - 1);
}

void bit_string::append(uint64_t value, unsigned width) {
  if (width == 0) return;
  if (width < 64) value &= (uint64_t{1} << width) - 1;
  const unsigned off = size_ & 63;
  if (off == 0) {
    words_.push_back(value);
  } else {
    words_.back() |= value << off;
    if (off + width > 64) words_.push_back(value >> (64 - off));
  }
  size_ += width;
}

void bit_string::append(const bit_string& other, size_t from, size_t to) {
  while (from < to) {
    const unsigned n = static_cast<unsigned>(to - from < 64 ? to - from : 64);
    append(other.read(from, n), n);
    from += n;
  }
}

void bit_string::splice(size_t from, size_t to, const bit_string& repl) {
  bit_string out;
  out.words_.reserve((size_ - (to - from) + repl.size() + 63) / 64);
  out.append(*this, 0, from);
  out.append(repl, 0, repl.size());
  out.append(*this, to, size_);
  *this = std::move(out);
}

void bit_string::insert_bit(size_t pos, bool v) {
  assert(pos <= size_);
  if (size_ % 64 == 0) words_.push_back(0);
  ++size_;
  const size_t w = pos >> 6;
  for (size_t k = words_.size() - 1; k > w; --k)
    words_[k] = (words_[k] << 1) | (words_[k - 1] >> 63);
  const unsigned off = pos & 63;
  const uint64_t low = off ? words_[w] & ((uint64_t{1} << off) - 1) : 0;
  const uint64_t high = off == 63 ? 0 : (words_[w] >> off) << (off + 1);
  words_[w] = low | high | (uint64_t{v} << off);
}

void bit_string::erase_bit(size_t pos) {
  assert(pos < size_);
  const size_t w = pos >> 6;
  const unsigned off = pos & 63;
  const uint64_t low = off ? words_[w] & ((uint64_t{1} << off) - 1) : 0;
  const uint64_t high = off == 63 ? 0 : (words_[w] >> (off + 1)) << off;
  words_[w] = low | high;
  for (size_t k = w + 1; k < words_.size(); ++k) {
    words_[k - 1] |= words_[k] << 63;
    words_[k] >>= 1;
  }
  --size_;
  if (size_ % 64 == 0) words_.pop_back();
}

size_t bit_string::popcount(size_t from, size_t to) const {
  size_t r = 0;
  while (from < to) {
    const unsigned n = static_cast<unsigned>(to - from < 64 ? to - from : 64);
    r += std::popcount(read(from, n));
    from += n;
  }
  return r;
}

size_t bit_string::select1(size_t k) const {
  for (size_t w = 0; w < words_.size(); ++w) {
    const size_t c = std::popcount(words_[w]);
    if (c < k) {
      k -= c;
      continue;
    }
    uint64_t x = words_[w];
    for (size_t j = 1; j < k; ++j) x &= x - 1;
    return w * 64 + std::countr_zero(x);
  }
  return size_;
}

}  // namespace dynwt
