#pragma once

#include <stdexcept>
#include <string>

namespace micromaser {

/// Failure categories reported by the library. The CLI prints the code
/// verbatim on its error line.
enum class ErrorCode {
  InvalidArgument,
  TruncationInadequate,
  ResourceExhausted,
  UndefinedLinewidth,
  NumericalFailure,
  IllConditioned,
  IntegrationFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::TruncationInadequate: return "truncation_inadequate";
    case ErrorCode::ResourceExhausted: return "resource_exhausted";
    case ErrorCode::UndefinedLinewidth: return "undefined_linewidth";
    case ErrorCode::NumericalFailure: return "numerical_failure";
    case ErrorCode::IllConditioned: return "ill_conditioned";
    case ErrorCode::IntegrationFailure: return "integration_failure";
  }
  return "unknown";
}

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

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace micromaser
