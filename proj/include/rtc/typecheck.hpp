#pragma once

#include <map>
#include <string>

#include "rtc/program.hpp"

namespace rtc {

using TypeEnv = std::map<std::string, TypeTag>;

/// Type of `e` under `env`. No implicit int/real coercion. `allow_infinity`
/// permits the `inf` literal in value positions (timeout definitions).
TypeTag type_of(const Expr& e, const TypeEnv& env, bool allow_infinity = false);

/// A program whose expressions all carry a type annotation.
struct TypedProgram {
  SpecProgram program;
  TypeEnv env;
  std::map<const void*, TypeTag> annotations;  // keyed by Expr::id()

  TypeTag type(const Expr& e) const { return annotations.at(e.id()); }
};

/// Checks every constraint, property and lemma is boolean, timeouts are
/// real, and `inf` only appears in `timeout = ...` definitions.
TypedProgram type_check(const SpecProgram& p);

}  // namespace rtc
