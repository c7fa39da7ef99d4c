#pragma once

#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rtc/errors.hpp"
#include "rtc/value.hpp"

namespace rtc {

enum class Op {
  Const, Var,
  Neg, Not,
  Add, Sub, Mul, Div,
  Or, And, Implies,
  Eq, Neq, Lt, Le, Gt, Ge,
  Ite, Arrow, Pre, Hist, Initz,
};

std::string_view op_name(Op op);

/// Immutable expression tree. Copies share structure; nodes are never mutated
/// after construction so values can be handed between threads freely.
class Expr {
 public:
  Expr() = default;

  Op op() const { return node_->op; }
  const Value& constant() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  std::span<const Expr> args() const { return node_->args; }
  const Expr& arg(std::size_t i) const { return node_->args.at(i); }
  SourceLoc loc() const { return node_->loc; }
  bool valid() const { return node_ != nullptr; }
  const void* id() const { return node_.get(); }

  static Expr make(Op op, std::vector<Expr> args, SourceLoc loc = {});
  static Expr constant(Value v, SourceLoc loc = {});
  static Expr variable(std::string name, SourceLoc loc = {});

  /// Structural equality; source locations are ignored.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  struct Node {
    Op op = Op::Const;
    Value value;
    std::string name;
    std::vector<Expr> args;
    SourceLoc loc;
  };
  std::shared_ptr<const Node> node_;
};

// Builders.
Expr lit(bool b);
Expr lit_int(long v);
Expr lit_int(const Rational& q);
Expr lit_real(const Rational& q);
Expr lit_infinity();
Expr var(std::string name);
Expr neg(Expr a);
Expr lnot(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr lor(Expr a, Expr b);
Expr land(Expr a, Expr b);
Expr implies(Expr a, Expr b);
Expr eq(Expr a, Expr b);
Expr neq(Expr a, Expr b);
Expr lt(Expr a, Expr b);
Expr le(Expr a, Expr b);
Expr gt(Expr a, Expr b);
Expr ge(Expr a, Expr b);
Expr ite(Expr c, Expr a, Expr b);
Expr arrow(Expr init, Expr rest);
Expr pre(Expr a);
Expr hist(Expr a);
Expr initz(Expr a);
/// Conjunction of a list; `true` when empty.
Expr conjunction(std::span<const Expr> parts);

/// Every variable name referenced anywhere in `e`.
std::set<std::string> referenced_vars(const Expr& e);
/// Variables read at the current instant, i.e. not only under `pre` or
/// `initz`. Used for instantaneous dependency ordering.
std::set<std::string> current_vars(const Expr& e);
bool contains_op(const Expr& e, Op op);

/// Applies `rename` to every variable reference.
template <class F>
Expr rename_vars(const Expr& e, F&& rename) {
  if (e.op() == Op::Var) return Expr::variable(rename(e.name()), e.loc());
  if (e.args().empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.args().size());
  for (const auto& a : e.args()) kids.push_back(rename_vars(a, rename));
  return Expr::make(e.op(), std::move(kids), e.loc());
}

/// Surface syntax, minimally parenthesized; re-parses to the same tree.
std::string to_source(const Expr& e);
/// Canonical s-expression form used by golden tests.
std::string to_sexpr(const Expr& e);

}  // namespace rtc
