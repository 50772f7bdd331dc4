#pragma once

#include <stdexcept>
#include <string>

namespace shockfit {

enum class ErrorCode {
  domain = 5,
  convergence = 6,
  range = 7,
  precondition = 8,
  inadmissible = 9,
  horizon = 10,
  integration = 11,
  stiffness = 12,
  config = 2,
  no_certificate = 3,
  internal = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::range: return "range";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::inadmissible: return "inadmissible";
    case ErrorCode::horizon: return "horizon";
    case ErrorCode::integration: return "integration";
    case ErrorCode::stiffness: return "stiffness";
    case ErrorCode::config: return "config";
    case ErrorCode::no_certificate: return "no_certificate";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace shockfit
