#pragma once

#include <stdexcept>
#include <string>

namespace sqmag {

// Numeric values are shared with the C API (sqmag_status).
enum class ErrorCode : int {
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  DivergentInductance = 10,
  PoleProximity = 11,
  FieldAboveCritical = 12,
  NoRationalWithinBound = 13,
  NonConvergence = 14,
  NoCandidate = 15,
  ZeroResponsivity = 16,
  InsufficientSpan = 17,
  SlopeMismatch = 18,
  Internal = 99,
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

}  // namespace sqmag
