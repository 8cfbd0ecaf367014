#pragma once

#include <stdexcept>
#include <string>

namespace ddlti {

enum class ErrorCode {
  InvalidInput,
  Inconsistent,
  EmptyRootSet,
  Unstable,
  ReductionAmbiguous,
  FactorizationFailed,
  AmbiguousMatch,
  Unsupported,
  NotStabilizable,
  NoConvergence,
};

const char* to_string(ErrorCode code);

// Numerical failures are the ones a caller cannot fix by correcting its input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace ddlti
