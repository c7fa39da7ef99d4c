#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtc/enumerate.hpp"
#include "rtc/solver.hpp"

namespace rtc {

enum class EngineKind { Explicit, Bmc, KInduction };

std::string_view to_string(EngineKind k);
std::optional<EngineKind> engine_from_string(std::string_view s);

enum class Verdict { Proved, Falsified, Unknown };

std::string_view to_string(Verdict v);

struct CheckResult {
  Verdict verdict = Verdict::Unknown;
  /// Proved: induction depth, or the search bound when `bounded`.
  /// Falsified: counterexample length. Unknown: depth reached.
  std::size_t bound = 0;
  /// Proved only up to `bound` (explicit enumeration and plain BMC).
  bool bounded = false;
  std::optional<TimedTrace> counterexample;
  std::optional<std::size_t> fail_step;  // 1-based
  std::string engine;
  double seconds = 0;
  std::string diagnostics;
};

struct EngineConfig {
  EngineKind kind = EngineKind::KInduction;
  std::size_t k = 8;
  SolverConfig solver;
  /// Explicit engine domain; with `restrict_domain` also bounds SMT inputs.
  EnumerationDomain domain;
  bool restrict_domain = false;
  /// Skip the lemma check (the caller has already proved them).
  bool lemmas_proved = false;
};

/// Exhaustive search for the shallowest admissible trace whose last step
/// falsifies `prop`.
CheckResult check_invariant_explicit(const SpecProgram& p, const Expr& prop, const EnumerationDomain& dom);

/// Decodes a solver model and re-validates it: the trace must be admissible
/// for `p` and falsify `prop` at its last step. Failure throws Error.
TimedTrace decode_counterexample(const SmtModel& model, const SpecProgram& p, const Expr& prop, std::size_t length);

/// BMC searches depths 1..k. k-induction first proves the program's lemmas,
/// then alternates base and step cases for n = 1..k.
CheckResult run_engine(const SpecProgram& p, const Expr& prop, const EngineConfig& cfg);

/// Lemma verdicts for k-induction; the first unproved lemma is named in the
/// diagnostics.
CheckResult check_lemmas(const SpecProgram& p, const EngineConfig& cfg);

struct Task {
  SpecProgram program;
  Expr property;
};

/// Runs body(0..n-1) on `threads` workers (0: one per core) and rethrows the
/// first failure by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Discharges tasks concurrently; results are in task order.
std::vector<CheckResult> discharge_all(const std::vector<Task>& tasks, const EngineConfig& cfg, unsigned threads = 0);

}  // namespace rtc
