#include "rtc/expr.hpp"

namespace rtc {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Neg: return "neg";
    case Op::Not: return "not";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Or: return "or";
    case Op::And: return "and";
    case Op::Implies: return "=>";
    case Op::Eq: return "=";
    case Op::Neq: return "<>";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Ite: return "ite";
    case Op::Arrow: return "->";
    case Op::Pre: return "pre";
    case Op::Hist: return "hist";
    case Op::Initz: return "initz";
  }
  return "?";
}

Expr Expr::make(Op op, std::vector<Expr> args, SourceLoc loc) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->loc = loc;
  Expr e;
  e.node_ = std::move(n);
  return e;
}

Expr Expr::constant(Value v, SourceLoc loc) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = std::move(v);
  n->loc = loc;
  Expr e;
  e.node_ = std::move(n);
  return e;
}

Expr Expr::variable(std::string name, SourceLoc loc) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->name = std::move(name);
  n->loc = loc;
  Expr e;
  e.node_ = std::move(n);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.op() != b.op()) return false;
  if (a.op() == Op::Const) return a.constant() == b.constant();
  if (a.op() == Op::Var) return a.name() == b.name();
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (a.arg(i) != b.arg(i)) return false;
  return true;
}

Expr lit(bool b) { return Expr::constant(Value::boolean(b)); }
Expr lit_int(long v) { return Expr::constant(Value::integer(v)); }
Expr lit_int(const Rational& q) { return Expr::constant(Value::integer(q)); }
Expr lit_real(const Rational& q) { return Expr::constant(Value::real(q)); }
Expr lit_infinity() { return Expr::constant(Value::infinity()); }
Expr var(std::string name) { return Expr::variable(std::move(name)); }
Expr neg(Expr a) { return Expr::make(Op::Neg, {std::move(a)}); }
Expr lnot(Expr a) { return Expr::make(Op::Not, {std::move(a)}); }
Expr add(Expr a, Expr b) { return Expr::make(Op::Add, {std::move(a), std::move(b)}); }
Expr sub(Expr a, Expr b) { return Expr::make(Op::Sub, {std::move(a), std::move(b)}); }
Expr mul(Expr a, Expr b) { return Expr::make(Op::Mul, {std::move(a), std::move(b)}); }
Expr div(Expr a, Expr b) { return Expr::make(Op::Div, {std::move(a), std::move(b)}); }
Expr lor(Expr a, Expr b) { return Expr::make(Op::Or, {std::move(a), std::move(b)}); }
Expr land(Expr a, Expr b) { return Expr::make(Op::And, {std::move(a), std::move(b)}); }
Expr implies(Expr a, Expr b) { return Expr::make(Op::Implies, {std::move(a), std::move(b)}); }
Expr eq(Expr a, Expr b) { return Expr::make(Op::Eq, {std::move(a), std::move(b)}); }
Expr neq(Expr a, Expr b) { return Expr::make(Op::Neq, {std::move(a), std::move(b)}); }
Expr lt(Expr a, Expr b) { return Expr::make(Op::Lt, {std::move(a), std::move(b)}); }
Expr le(Expr a, Expr b) { return Expr::make(Op::Le, {std::move(a), std::move(b)}); }
Expr gt(Expr a, Expr b) { return Expr::make(Op::Gt, {std::move(a), std::move(b)}); }
Expr ge(Expr a, Expr b) { return Expr::make(Op::Ge, {std::move(a), std::move(b)}); }
Expr ite(Expr c, Expr a, Expr b) { return Expr::make(Op::Ite, {std::move(c), std::move(a), std::move(b)}); }
Expr arrow(Expr init, Expr rest) { return Expr::make(Op::Arrow, {std::move(init), std::move(rest)}); }
Expr pre(Expr a) { return Expr::make(Op::Pre, {std::move(a)}); }
Expr hist(Expr a) { return Expr::make(Op::Hist, {std::move(a)}); }
Expr initz(Expr a) { return Expr::make(Op::Initz, {std::move(a)}); }

Expr conjunction(std::span<const Expr> parts) {
  if (parts.empty()) return lit(true);
  Expr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = land(acc, parts[i]);
  return acc;
}

namespace {

void collect(const Expr& e, std::set<std::string>& out, bool current_only) {
  if (e.op() == Op::Var) {
    out.insert(e.name());
    return;
  }
  if (current_only && (e.op() == Op::Pre || e.op() == Op::Initz)) return;
  for (const auto& a : e.args()) collect(a, out, current_only);
}

}  // namespace

std::set<std::string> referenced_vars(const Expr& e) {
  std::set<std::string> out;
  collect(e, out, false);
  return out;
}

std::set<std::string> current_vars(const Expr& e) {
  std::set<std::string> out;
  collect(e, out, true);
  return out;
}

bool contains_op(const Expr& e, Op op) {
  if (e.op() == op) return true;
  for (const auto& a : e.args())
    if (contains_op(a, op)) return true;
  return false;
}

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Arrow: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not: return 5;
    case Op::Eq: case Op::Neq: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 6;
    case Op::Add: case Op::Sub: return 7;
    case Op::Mul: case Op::Div: return 8;
    case Op::Neg: return 9;
    case Op::Const:
      // Negative literals carry a leading minus and bind like unary negation.
      if (e.constant().is_numeric() && e.constant().as_rational() < 0) return 9;
      return 10;
    default: return 10;
  }
}

std::string constant_source(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Infinity: return "inf";
    case Value::Kind::Int: return v.as_rational().get_num().get_str();
    case Value::Kind::Real: {
      if (auto d = rational_to_decimal(v.as_rational())) return *d;
      const auto& q = v.as_rational();
      return "frac(" + q.get_num().get_str() + ", " + q.get_den().get_str() + ")";
    }
  }
  return "?";
}

std::string print(const Expr& e, int ctx);

std::string wrap(const Expr& e, int ctx) {
  std::string s = print(e, ctx);
  return precedence(e) < ctx ? "(" + s + ")" : s;
}

std::string print(const Expr& e, int) {
  switch (e.op()) {
    case Op::Const: return constant_source(e.constant());
    case Op::Var: return e.name();
    case Op::Neg: {
      const Expr& a = e.arg(0);
      bool literal = a.op() == Op::Const && a.constant().is_numeric();
      bool negative = a.op() == Op::Neg || (literal && a.constant().as_rational() < 0);
      // `-5` would re-parse as a literal and `--x` as a comment, so guard both.
      if (literal || negative) return "-(" + print(a, 0) + ")";
      return "-" + wrap(a, 9);
    }
    case Op::Not: return "not " + wrap(e.arg(0), 5);
    case Op::Arrow:
    case Op::Implies: {
      int p = precedence(e);
      return wrap(e.arg(0), p + 1) + " " + std::string(op_name(e.op())) + " " + wrap(e.arg(1), p);
    }
    case Op::Or: case Op::And: case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
      int p = precedence(e);
      return wrap(e.arg(0), p) + " " + std::string(op_name(e.op())) + " " + wrap(e.arg(1), p + 1);
    }
    case Op::Eq: case Op::Neq: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge:
      return wrap(e.arg(0), 7) + " " + std::string(op_name(e.op())) + " " + wrap(e.arg(1), 7);
    case Op::Ite:
      return "ite(" + print(e.arg(0), 0) + ", " + print(e.arg(1), 0) + ", " + print(e.arg(2), 0) + ")";
    case Op::Pre:
    case Op::Hist:
    case Op::Initz:
      return std::string(op_name(e.op())) + "(" + print(e.arg(0), 0) + ")";
  }
  return "?";
}

}  // namespace

std::string to_source(const Expr& e) { return print(e, 0); }

std::string to_sexpr(const Expr& e) {
  switch (e.op()) {
    case Op::Const: {
      const Value& v = e.constant();
      switch (v.kind()) {
        case Value::Kind::Bool: return v.as_bool() ? "(bool true)" : "(bool false)";
        case Value::Kind::Int: return "(int " + v.to_string() + ")";
        case Value::Kind::Real: return "(real " + v.to_string() + ")";
        case Value::Kind::Infinity: return "(infinity)";
      }
      return "?";
    }
    case Op::Var: return "(var " + e.name() + ")";
    default: {
      std::string s = "(" + std::string(op_name(e.op()));
      for (const auto& a : e.args()) s += " " + to_sexpr(a);
      return s + ")";
    }
  }
}

}  // namespace rtc
