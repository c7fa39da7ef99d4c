#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rtc/engine.hpp"
#include "rtc/enumerate.hpp"
#include "rtc/pattern.hpp"

namespace rtc {

/// Outcome of one cross-checking suite.
struct SuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t cases = 0;   // hosts or random traces examined
  std::size_t traces = 0;  // trace prefixes compared
  std::size_t discrepancies = 0;
  std::vector<std::string> details;  // first few discrepancies
  double seconds = 0;

  bool ok() const { return discrepancies == 0 && cases > 0; }
  void note(std::string d);
};

/// Untimed hosts over boolean signals `c` and `e`.
std::vector<std::string> observer_hosts();
/// Hosts over `c` and `e` all of whose traces lie in L_prop for `window`.
std::vector<std::string> prop_hosts(const Interval& window);

/// For every host prefix: some observer extension falsifies `pass` iff the
/// prefix is out of L_patt.
SuiteReport observer_equivalence_suite(const std::vector<std::string>& hosts, const Interval& window,
                                       const EnumerationDomain& dom);

/// For every host prefix: admissible under the L_cons constraint iff in L_patt.
/// Hosts whose traces leave L_prop are reported as discrepancies.
SuiteReport constraint_equivalence_suite(const std::vector<std::string>& hosts, const Interval& window,
                                         const EnumerationDomain& dom);

/// Random timed trace over boolean `c` and `e`.
TimedTrace random_ce_trace(std::mt19937_64& rng, std::size_t max_len, long max_delta);

/// L_patt membership implies L_cons membership on `count` random traces.
SuiteReport inclusion_suite(std::uint64_t seed, std::size_t count, const Interval& window);

/// A small random program with one property, and the domain it is explored
/// over.
struct AgreementCase {
  std::string source;
  EnumerationDomain domain;
};

AgreementCase random_agreement_case(std::mt19937_64& rng);

/// Explicit enumeration against BMC at the same horizon (same verdict and
/// failing step) and k-induction (never proves what enumeration falsifies).
/// SMT counterexamples are re-validated as they are decoded.
SuiteReport engine_agreement_suite(std::uint64_t seed, std::size_t count, const SolverConfig& solver,
                                   unsigned threads = 0);

}  // namespace rtc
