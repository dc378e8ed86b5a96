#pragma once

#include <stdexcept>
#include <string>

namespace ecotrace {

/// Failure categories shared by the C++ core and the C API.
/// The numeric values are part of the C ABI (see ecotrace.h).
enum class ErrorCode : int {
  ok = 0,
  domain = 1,            // argument outside the admissible interval
  invalid_model = 2,     // potential violates the single-minimum hypotheses
  parse = 3,             // configuration text could not be parsed
  unknown_key = 4,
  missing_key = 5,
  step_underflow = 6,
  max_steps = 7,
  ambiguous_event = 8,
  escaped = 9,
  near_equilibrium = 10,
  undecided = 11,
  unresolved_endpoints = 12,
  refinement_budget = 13,
  not_found = 14,
  not_found_guaranteed = 15,
  defective_spectrum = 16,
  projection = 17,
  io = 18,
  invalid_argument = 19,
  internal = 99,
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

}  // namespace ecotrace
