#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pberg {

enum class ErrorCode {
  Parameter,
  UnsupportedDomain,
  EmptyRegion,
  IllConditioned,
  Convergence,
  Rank,
  Geometry,
  StepSize,
  Range,
  Domain,
  Undefined,
  CounterexampleViolation,
  Bracketing,
  Config,
  Io,
};

/// Stable machine-readable name, used in CLI error output.
std::string_view error_code_name(ErrorCode code) noexcept;

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

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace pberg
