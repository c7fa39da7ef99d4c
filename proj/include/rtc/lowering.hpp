#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtc/source.hpp"

namespace rtc {

enum class BundleMode { PropertyObserver, Constraint, PropSideCondition };

std::string_view to_string(BundleMode m);

/// Fresh variables and constraints produced by lowering one pattern.
struct ObserverBundle {
  BundleMode mode = BundleMode::Constraint;
  std::vector<VarDecl> fresh_vars;
  /// Constraints that only pin down fresh variables (definitions, and the
  /// `rec_c => c` restriction of an observer).
  std::vector<NamedExpr> constraints;
  /// Constraint mode: the restriction on host behaviour, a fresh `ok` variable.
  std::optional<Expr> restriction;
  /// Observer and side-condition modes: the invariant to prove.
  std::optional<Expr> property;
  /// Fresh timeout variables to add to the host calendar.
  std::vector<std::string> timeouts;
};

/// Unsupported pattern/mode combinations.
class UnsupportedLowering : public Error {
 public:
  using Error::Error;
};

/// Observer whose `pass` variable is invariant iff every trace is in the
/// pattern's set. For whenever-occurs-occurs this is the four-constraint
/// run/timer/rec_c/pass observer. `prefix` is prepended to fresh names.
ObserverBundle compile_property_observer(const Pattern& pat, const SpecProgram& host, const std::string& prefix = "");

/// Monitor definitions plus an `ok` restriction. For whenever-occurs-occurs the
/// admitted traces are L_cons.
ObserverBundle compile_constraint(const Pattern& pat, const SpecProgram& host, const std::string& prefix = "");

/// Lookback monitor whose `pass` is invariant iff every trace is in L_prop.
ObserverBundle compile_prop_side_condition(const WheneverEventEvent& pat, const SpecProgram& host,
                                           const std::string& prefix = "");

/// Adds the bundle's variables, constraints and timeouts to `host`. In
/// constraint mode the restriction is added too, named `name`.
void apply_bundle(SpecProgram& host, const ObserverBundle& b, const std::string& name);

/// Core-language rendering of a bundle, one constraint per line.
std::string to_source(const ObserverBundle& b);

/// Identifier-safe form of a clause name, used to prefix its fresh variables.
std::string sanitize_name(const std::string& name);

enum class PropertyKind { Property, SideCondition };

/// A program with every pattern clause lowered.
struct ElaboratedProgram {
  SpecProgram program;
  /// Parallel to program.properties.
  std::vector<PropertyKind> kinds;
};

/// Lowers pattern constraints through compile_constraint (and adds the L_prop
/// side condition of every whenever-occurs-occurs constraint as a property)
/// and pattern properties through compile_property_observer.
ElaboratedProgram elaborate(const ProgramSource& src);

/// Reads, parses, lowers and type-checks a flat program.
ElaboratedProgram load_program_text(std::string_view text);
std::string read_file(const std::string& path);

}  // namespace rtc
