#pragma once

#include <stdexcept>
#include <string>

namespace chevrep {

// Status classes shared by the C++ core and the C API.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Config = 2,
  Budget = 3,
  Precondition = 4,
  Io = 5,
  Internal = 6,
};

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

}  // namespace chevrep
