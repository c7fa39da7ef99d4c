#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rtc/program.hpp"
#include "rtc/semantics.hpp"
#include "rtc/trace.hpp"

namespace rtc {

/// Finite domain for exhaustive enumeration.
struct EnumerationDomain {
  std::vector<Rational> time_deltas{Rational(1)};
  std::vector<Rational> int_grid{Rational(0), Rational(1), Rational(2)};
  std::vector<Rational> real_grid{Rational(0), Rational(1)};
  std::size_t horizon = 4;
  std::uint64_t ceiling = 1'000'000;

  /// Throws Error unless grids are nonempty, deltas positive, horizon >= 1.
  void validate() const;
};

class DomainExplosion : public Error {
 public:
  using Error::Error;
};

/// How each step of a program is generated: free variables range over the
/// domain, defined variables (`v = e` with e not reading v now) are computed
/// in dependency order, and the remaining constraints filter.
struct StepPlan {
  enum class Source { Free, Defined, Calendar, FreeClock };
  struct Action {
    std::size_t slot;  // trace slot, 0 is `t`
    Source source;
    Expr rhs;          // Defined only
  };
  std::vector<std::string> vars;  // trace variable order (excludes t)
  std::vector<Action> actions;
  std::vector<NamedExpr> filters;

  bool is_free(std::size_t slot) const;
};

StepPlan plan_steps(const SpecProgram& p);

/// Candidate values of a free slot under `dom`.
std::vector<Value> free_values(const SpecProgram& p, const StepPlan& plan, std::size_t slot,
                               const EnumerationDomain& dom);

/// Depth-first enumeration with constraint pruning. `visit` sees every
/// admissible prefix (lengths 1..horizon) and returns false to stop, or the
/// caller may lower `limit` to cut the search depth.
class TraceEnumerator {
 public:
  TraceEnumerator(const SpecProgram& p, EnumerationDomain dom);

  using Visitor = std::function<bool(const TimedTrace&)>;
  void run(const Visitor& visit);
  /// Current depth bound; a visitor may shrink it while the search runs.
  std::size_t& limit() { return limit_; }
  std::uint64_t visited() const { return visited_; }
  /// Upper bound on the number of prefixes, used in explosion reports.
  long double estimate() const;

 private:
  bool extend(const Visitor& visit);
  bool assign(std::size_t action, const Visitor& visit);
  bool finish_step(const Visitor& visit);

  const SpecProgram& p_;
  EnumerationDomain dom_;
  StepPlan plan_;
  TimedTrace tr_;
  std::size_t limit_;
  std::uint64_t visited_ = 0;
};

/// Every admissible trace of length exactly `dom.horizon`, in deterministic
/// order.
std::vector<TimedTrace> enumerate_traces(const SpecProgram& p, const EnumerationDomain& dom);

struct Simulation {
  TimedTrace trace;
  std::optional<Violation> violation;  // first inadmissible step, if any
};

/// Steps `p` for `steps` steps (0: as many as `inputs` has). Values present
/// in `inputs` are used as given; defined variables and the calendar clock
/// are computed. Stops at the first inadmissible step. Throws Error when a
/// free variable has no supplied value.
Simulation simulate(const SpecProgram& p, const TimedTrace& inputs, std::size_t steps = 0);

}  // namespace rtc
