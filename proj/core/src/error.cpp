#include "ddlti/error.hpp"

namespace ddlti {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::EmptyRootSet: return "EmptyRootSet";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::ReductionAmbiguous: return "ReductionAmbiguous";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::NotStabilizable: return "NotStabilizable";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::Unsupported:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ddlti
