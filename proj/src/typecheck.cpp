#include "rtc/typecheck.hpp"

namespace rtc {

namespace {

struct Checker {
  const TypeEnv& env;
  std::map<const void*, TypeTag>* notes;

  [[noreturn]] void fail(const Expr& e, const std::string& msg) const {
    throw TypeError(msg + " in '" + to_source(e) + "'");
  }

  TypeTag numeric(const Expr& e, TypeTag t) const {
    if (t == TypeTag::Bool) fail(e, "arithmetic on boolean operand");
    return t;
  }

  TypeTag check(const Expr& e, bool allow_inf) {
    TypeTag t = infer(e, allow_inf);
    if (notes) (*notes)[e.id()] = t;
    return t;
  }

  TypeTag infer(const Expr& e, bool allow_inf) {
    switch (e.op()) {
      case Op::Const: {
        const Value& v = e.constant();
        switch (v.kind()) {
          case Value::Kind::Bool: return TypeTag::Bool;
          case Value::Kind::Int: return TypeTag::Int;
          case Value::Kind::Real: return TypeTag::Real;
          case Value::Kind::Infinity:
            if (!allow_inf) fail(e, "'inf' is only allowed in timeout definitions");
            return TypeTag::Real;
        }
        break;
      }
      case Op::Var: {
        auto it = env.find(e.name());
        if (it == env.end()) fail(e, "unknown identifier '" + e.name() + "'");
        return it->second;
      }
      case Op::Neg: return numeric(e, check(e.arg(0), false));
      case Op::Not:
        if (check(e.arg(0), false) != TypeTag::Bool) fail(e, "boolean required");
        return TypeTag::Bool;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
        TypeTag a = numeric(e, check(e.arg(0), false));
        TypeTag b = numeric(e, check(e.arg(1), false));
        if (a != b) fail(e, "operand type mismatch (" + std::string(to_string(a)) + " vs " + std::string(to_string(b)) + ")");
        return a;
      }
      case Op::Or: case Op::And: case Op::Implies:
        if (check(e.arg(0), false) != TypeTag::Bool || check(e.arg(1), false) != TypeTag::Bool)
          fail(e, "boolean required");
        return TypeTag::Bool;
      case Op::Eq: case Op::Neq: {
        TypeTag a = check(e.arg(0), allow_inf);
        TypeTag b = check(e.arg(1), allow_inf);
        if (a != b) fail(e, "comparison type mismatch");
        return TypeTag::Bool;
      }
      case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: {
        TypeTag a = numeric(e, check(e.arg(0), false));
        TypeTag b = numeric(e, check(e.arg(1), false));
        if (a != b) fail(e, "comparison type mismatch");
        return TypeTag::Bool;
      }
      case Op::Ite: {
        if (check(e.arg(0), false) != TypeTag::Bool) fail(e, "ite condition must be boolean");
        TypeTag a = check(e.arg(1), allow_inf);
        TypeTag b = check(e.arg(2), allow_inf);
        if (a != b) fail(e, "ite branch type mismatch");
        return a;
      }
      case Op::Arrow: {
        TypeTag a = check(e.arg(0), allow_inf);
        TypeTag b = check(e.arg(1), allow_inf);
        if (a != b) fail(e, "'->' operand type mismatch");
        return a;
      }
      case Op::Pre: return check(e.arg(0), allow_inf);
      case Op::Hist: case Op::Initz:
        if (check(e.arg(0), false) != TypeTag::Bool) fail(e, "boolean required");
        return TypeTag::Bool;
    }
    fail(e, "unsupported expression");
  }
};

bool is_timeout_definition(const SpecProgram& p, const Expr& e) {
  return e.op() == Op::Eq && e.arg(0).op() == Op::Var && p.is_timeout(e.arg(0).name());
}

}  // namespace

TypeTag type_of(const Expr& e, const TypeEnv& env, bool allow_infinity) {
  Checker c{env, nullptr};
  return c.check(e, allow_infinity);
}

TypedProgram type_check(const SpecProgram& p) {
  check_names(p);
  TypedProgram out{p, p.type_env(), {}};
  Checker c{out.env, &out.annotations};
  auto require_bool = [&](const NamedExpr& ne, bool allow_inf) {
    if (c.check(ne.expr, allow_inf) != TypeTag::Bool)
      throw TypeError("'" + ne.name + "' must be boolean: '" + to_source(ne.expr) + "'");
  };
  for (const auto& ne : out.program.transition) require_bool(ne, is_timeout_definition(p, ne.expr));
  for (const auto& ne : out.program.properties) require_bool(ne, false);
  for (const auto& ne : out.program.lemmas) require_bool(ne, false);
  return out;
}

}  // namespace rtc
