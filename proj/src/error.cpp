#include "ecotrace/error.hpp"

namespace ecotrace {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::domain: return "domain";
    case ErrorCode::invalid_model: return "invalid_model";
    case ErrorCode::parse: return "parse";
    case ErrorCode::unknown_key: return "unknown_key";
    case ErrorCode::missing_key: return "missing_key";
    case ErrorCode::step_underflow: return "step_underflow";
    case ErrorCode::max_steps: return "max_steps";
    case ErrorCode::ambiguous_event: return "ambiguous_event";
    case ErrorCode::escaped: return "escaped";
    case ErrorCode::near_equilibrium: return "near_equilibrium";
    case ErrorCode::undecided: return "undecided";
    case ErrorCode::unresolved_endpoints: return "unresolved_endpoints";
    case ErrorCode::refinement_budget: return "refinement_budget";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::not_found_guaranteed: return "not_found_guaranteed";
    case ErrorCode::defective_spectrum: return "defective_spectrum";
    case ErrorCode::projection: return "projection";
    case ErrorCode::io: return "io";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace ecotrace
