#pragma once

#include <stdexcept>
#include <string>

namespace dtem {

// Error categories. The numeric values are shared with the C API status codes.
enum class ErrorCode : int {
  ok = 0,
  domain = 1,            // argument outside the mathematical domain
  invalid_argument = 2,  // malformed input or violated precondition
  mismatch = 3,          // incompatible grids / metadata
  io = 4,                // file system or parse failure
  coverage = 5,          // reciprocal space not sufficiently sampled
  internal = 6,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace dtem
