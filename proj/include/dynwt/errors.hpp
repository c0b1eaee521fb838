#pragma once

#include <stdexcept>
#include <string>

namespace dynwt {

enum class errc {
  invalid_digit,
  empty_chunk,
  corrupt_chunk,
  out_of_range,
  not_found,
  double_delete,
  dangling_handle,
  duplicate_link,
  duplicate_id,
  unknown_block,
  unsupported,
  overflow,
  underflow,
  bad_format,
  io,
  invariant,
};

const char* to_string(errc code);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace dynwt
