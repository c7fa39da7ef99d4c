#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtc/expr.hpp"

namespace rtc {

/// Name of the implicit real-valued clock variable.
inline constexpr std::string_view kTimeVar = "t";

struct VarDecl {
  std::string name;
  TypeTag type = TypeTag::Bool;
  SourceLoc loc;
};

struct NamedExpr {
  std::string name;
  Expr expr;
};

/// A transition system (V, T, P). The transition relation is the conjunction
/// of `transition`; `timeouts` name the real variables feeding the calendar.
struct SpecProgram {
  std::vector<VarDecl> vars;
  std::vector<NamedExpr> transition;
  std::vector<NamedExpr> properties;
  std::vector<NamedExpr> lemmas;
  std::vector<std::string> timeouts;

  bool timed() const { return !timeouts.empty(); }
  const VarDecl* find(std::string_view name) const;
  bool is_timeout(std::string_view name) const;
  /// Declared variables plus `t`.
  std::map<std::string, TypeTag> type_env() const;
  /// Lowest "<base>", "<base>_1", "<base>_2", ... not already declared.
  std::string fresh_name(const std::string& base) const;
  void add_var(std::string name, TypeTag type);
};

/// Checks that every variable reference resolves; throws Error otherwise.
void check_names(const SpecProgram& p);

/// Pretty-prints a program in `.rtc` syntax. Output re-parses to an equal
/// program.
std::string to_source(const SpecProgram& p);

bool operator==(const SpecProgram& a, const SpecProgram& b);

}  // namespace rtc
