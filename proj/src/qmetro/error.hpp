#pragma once

#include <stdexcept>
#include <string>

namespace qmetro {

enum class ErrorCode {
  InvalidArgument,     // caller violated a precondition
  InvariantViolation,  // a state or operator failed its validity checks
  DegenerateNullspace, // stationary state is not unique
  DegenerateMeasurement,
  Numerical,           // non-finite values, failed convergence checks
  Config,
  Io,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace qmetro
