#pragma once

#include <map>
#include <string>
#include <vector>

#include "rtc/enumerate.hpp"
#include "rtc/program.hpp"
#include "rtc/trace.hpp"

namespace rtc {

/// One unrolling of the transition relation over positions 0..length-1.
struct SmtQuery {
  std::size_t length = 1;
  /// Position 0 is the first step of a trace. Otherwise it is an arbitrary
  /// reachable-looking state, as in the induction step.
  bool from_initial = true;
  /// The property is asserted at every position before the last.
  bool assume_before = true;
  /// Ask for a violation at any position instead of only the last one.
  bool violate_any = false;
  /// Proven invariants asserted at every position.
  std::vector<Expr> invariants;
};

/// Solver model: symbol (without quoting bars) to value, with numbers in
/// "num/den" form and booleans as "true"/"false".
struct SmtModel {
  std::map<std::string, std::string> values;
};

/// SMT-LIB 2.6 encoding of a program over linear integer/real arithmetic.
/// The value of variable x at position i is the constant |x@i|. Infinite
/// timeouts are encoded as -1.
class SmtEncoder {
 public:
  /// With `domain`, free inputs and clock steps are restricted to its grids so
  /// that the encoding explores exactly what the enumerator explores.
  explicit SmtEncoder(SpecProgram p, const EnumerationDomain* domain = nullptr);

  /// Throws Error for nonlinear arithmetic.
  std::string script(const Expr& prop, const SmtQuery& q) const;

  /// Trace over the program's declared variables. Missing symbols take the
  /// default value of their type.
  TimedTrace decode(const SmtModel& m, std::size_t length) const;

  static std::string symbol(std::string_view var, std::size_t pos);

 private:
  SpecProgram p_;
  std::optional<EnumerationDomain> domain_;
};

enum class SmtMode { Bmc, KInduction };

/// `Bmc`: a violation at some position below k. `KInduction`: the inductive
/// step of depth k, with the program's lemmas as invariants.
std::string emit_smtlib(const SpecProgram& p, const Expr& prop, SmtMode mode, std::size_t k);

}  // namespace rtc
