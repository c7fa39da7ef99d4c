#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtc/smt.hpp"

namespace rtc {

struct SolverConfig {
  std::string path = "z3";
  std::vector<std::string> args{"-in"};
  double timeout_seconds = 300;
};

enum class SatResult { Sat, Unsat, Unknown };

std::string_view to_string(SatResult r);

struct SolverAnswer {
  SatResult result = SatResult::Unknown;
  SmtModel model;            // Sat only
  std::string diagnostics;   // solver errors, crashes, timeouts
};

/// Runs the solver on `script` through its standard input. Crashes and
/// timeouts come back as Unknown with diagnostics; an unparsable model throws
/// SolverError.
SolverAnswer run_solver(const SolverConfig& cfg, const std::string& script);

/// Parses a get-model response, either `(model (define-fun ...) ...)` or
/// `((define-fun ...) ...)`.
SmtModel parse_model(std::string_view text);

/// Parses complete solver output: a check-sat answer followed by an optional
/// model.
SolverAnswer parse_solver_output(std::string_view text);

/// $RTC_SOLVER if set, otherwise "z3" looked up on PATH. Empty when absent.
std::string default_solver_path();

}  // namespace rtc
