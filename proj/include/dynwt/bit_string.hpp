#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dynwt {

/// Growable packed bit sequence. Fields are written LSB-first.
class bit_string {
 public:
  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  void clear() {
    words_.clear();
    size_ = 0;
  }

  bool test(size_t pos) const { return (words_[pos >> 6] >> (pos & 63)) & 1; }
  void set(size_t pos, bool v);

  /// Reads `width` (<= 64) bits starting at `pos`.
  uint64_t read(size_t pos, unsigned width) const;
  void append(uint64_t value, unsigned width);
  void append(const bit_string& other, size_t from, size_t to);
  void push_back(bool v) { append(v ? 1 : 0, 1); }

  void insert_bit(size_t pos, bool v);
  void erase_bit(size_t pos);

  /// Replaces bits [from, to) with `repl`.
  void splice(size_t from, size_t to, const bit_string& repl);

  /// Ones in [from, to).
  size_t popcount(size_t from, size_t to) const;
  /// Position of the k-th one (k >= 1).
  size_t select1(size_t k) const;

  const std::vector<uint64_t>& words() const { return words_; }
  size_t heap_bytes() const { return words_.capacity() * sizeof(uint64_t); }

  bool operator==(const bit_string& o) const { return size_ == o.size_ && words_ == o.words_; }

 private:
  std::vector<uint64_t> words_;
  size_t size_ = 0;
};

}  // namespace dynwt
