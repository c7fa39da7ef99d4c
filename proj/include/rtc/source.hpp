#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtc/pattern.hpp"
#include "rtc/program.hpp"

namespace rtc {

/// A named clause whose body is either a plain boolean expression or a
/// pattern phrase.
struct Clause {
  std::string name;
  std::variant<Expr, Pattern> body;
  SourceLoc loc;

  bool is_pattern() const { return std::holds_alternative<Pattern>(body); }
};

enum class PatternRole { Constraint, Property };

struct PatternClause {
  std::string name;
  Pattern pattern;
  PatternRole role = PatternRole::Constraint;
  SourceLoc loc;
};

/// A flat program as written, before pattern clauses are lowered.
struct ProgramSource {
  SpecProgram program;
  std::vector<PatternClause> patterns;

  bool empty() const {
    return program.vars.empty() && program.transition.empty() && program.properties.empty() &&
           program.lemmas.empty() && patterns.empty();
  }
};

enum class PortDir { Input, Output };

struct Port {
  std::string name;
  TypeTag type = TypeTag::Bool;
  PortDir dir = PortDir::Input;
};

struct Connection {
  std::string from;
  std::string to;
  SourceLoc loc;
};

struct SubInstance {
  std::string name;
  std::string type;
  SourceLoc loc;
};

struct ComponentDef {
  std::string name;
  SourceLoc loc;
  std::vector<Port> ports;
  std::vector<VarDecl> locals;  // introduced by `eq`
  std::vector<NamedExpr> eqs;
  std::vector<Clause> assumptions;
  std::vector<Clause> guarantees;
  std::vector<SubInstance> subs;
  std::vector<Connection> connections;
  std::optional<ProgramSource> body;
};

struct SystemModel {
  std::vector<ComponentDef> components;
  std::string top;

  const ComponentDef* find(std::string_view name) const;
};

struct SourceFile {
  ProgramSource program;
  std::optional<SystemModel> system;
};

/// Parses `.rtc` text. Throws SyntaxError (with line/column) or Error for
/// duplicate declarations, unknown identifiers and ill-formed `pre`.
SourceFile parse_source(std::string_view text);
Expr parse_expr(std::string_view text);

}  // namespace rtc
