#pragma once

#include <stdexcept>
#include <string>

namespace fermi {

enum class ErrorCode {
  Ok = 0,
  CheckFailed = 1,
  Config = 2,
  Geometry = 3,
  Divergence = 4,
  InvalidArgument = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace fermi
