#include "pberg/error.hpp"

namespace pberg {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::UnsupportedDomain: return "unsupported-domain";
    case ErrorCode::EmptyRegion: return "empty-region";
    case ErrorCode::IllConditioned: return "ill-conditioned-basis";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::Rank: return "rank";
    case ErrorCode::Geometry: return "geometry";
    case ErrorCode::StepSize: return "step-size";
    case ErrorCode::Range: return "range";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Undefined: return "undefined";
    case ErrorCode::CounterexampleViolation: return "counterexample-violation";
    case ErrorCode::Bracketing: return "bracketing";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace pberg
