#include "rtc/smt.hpp"

#include <sstream>

#include "rtc/typecheck.hpp"

namespace rtc {

namespace {

std::string sort_of(TypeTag t) {
  switch (t) {
    case TypeTag::Bool: return "Bool";
    case TypeTag::Int: return "Int";
    case TypeTag::Real: return "Real";
  }
  return "?";
}

std::string numeral(const mpz_class& z, bool real) {
  mpz_class a = abs(z);
  std::string s = a.get_str() + (real ? ".0" : "");
  return z < 0 ? "(- " + s + ")" : s;
}

std::string rational_term(const Rational& q, bool real) {
  if (!real || q.get_den() == 1) return numeral(q.get_num(), real);
  mpz_class n = abs(q.get_num());
  std::string frac = "(/ " + n.get_str() + ".0 " + q.get_den().get_str() + ".0)";
  return q < 0 ? "(- " + frac + ")" : frac;
}

const std::string kTrue = "true";
const std::string kFalse = "false";
const std::string kInfinity = "(- 1.0)";
const std::string kInit = "|#init|";
const std::string kPrevTime = "|#tprev|";

std::string mk_not(const std::string& a) {
  if (a == kTrue) return kFalse;
  if (a == kFalse) return kTrue;
  return "(not " + a + ")";
}

std::string mk_and(const std::vector<std::string>& parts) {
  std::vector<const std::string*> keep;
  for (const auto& s : parts) {
    if (s == kFalse) return kFalse;
    if (s != kTrue) keep.push_back(&s);
  }
  if (keep.empty()) return kTrue;
  if (keep.size() == 1) return *keep[0];
  std::string out = "(and";
  for (auto* s : keep) out += " " + *s;
  return out + ")";
}

std::string mk_or(const std::vector<std::string>& parts) {
  std::vector<const std::string*> keep;
  for (const auto& s : parts) {
    if (s == kTrue) return kTrue;
    if (s != kFalse) keep.push_back(&s);
  }
  if (keep.empty()) return kFalse;
  if (keep.size() == 1) return *keep[0];
  std::string out = "(or";
  for (auto* s : keep) out += " " + *s;
  return out + ")";
}

std::string mk_ite(const std::string& c, const std::string& a, const std::string& b) {
  if (c == kTrue || a == b) return a;
  if (c == kFalse) return b;
  return "(ite " + c + " " + a + " " + b + ")";
}

// Replaces hist/initz by fresh boolean variables with recursive definitions.
class Lowering {
 public:
  explicit Lowering(SpecProgram& p) : p_(p) {}

  Expr lower(const Expr& e) {
    if (e.args().empty()) return e;
    std::vector<Expr> kids;
    for (const auto& a : e.args()) kids.push_back(lower(a));
    Expr r = Expr::make(e.op(), std::move(kids), e.loc());
    if (e.op() != Op::Hist && e.op() != Op::Initz) return r;
    std::string key = to_sexpr(r);
    if (auto it = memo_.find(key); it != memo_.end()) return var(it->second);
    std::string name = (e.op() == Op::Hist ? "#hist" : "#initz") + std::to_string(memo_.size() + 1);
    memo_[key] = name;
    Expr v = var(name);
    Expr def = e.op() == Op::Hist ? land(r.arg(0), arrow(lit(true), pre(v))) : arrow(lit(true), pre(r.arg(0)));
    aux_.push_back(name);
    defs_.push_back({name + "_def", eq(v, def)});
    return v;
  }

  void flush() {
    for (const auto& n : aux_) p_.add_var(n, TypeTag::Bool);
    for (auto& d : defs_) p_.transition.push_back(std::move(d));
    aux_.clear();
    defs_.clear();
  }

 private:
  SpecProgram& p_;
  std::map<std::string, std::string> memo_;
  std::vector<std::string> aux_;
  std::vector<NamedExpr> defs_;
};

bool is_constant(const Expr& e) { return referenced_vars(e).empty() && !contains_op(e, Op::Pre); }

class Unroller {
 public:
  Unroller(const SpecProgram& p, const SmtQuery& q) : p_(p), q_(q), env_(p.type_env()) {}

  std::string holds(const Expr& e, std::size_t i) { return mk_and({defined(e, i), term(e, i)}); }

  std::string term(const Expr& e, std::size_t i) {
    switch (e.op()) {
      case Op::Const: {
        const Value& v = e.constant();
        switch (v.kind()) {
          case Value::Kind::Bool: return v.as_bool() ? kTrue : kFalse;
          case Value::Kind::Int: return rational_term(v.as_rational(), false);
          case Value::Kind::Real: return rational_term(v.as_rational(), true);
          case Value::Kind::Infinity: return kInfinity;
        }
        break;
      }
      case Op::Var: return SmtEncoder::symbol(e.name(), i);
      case Op::Neg: return "(- " + term(e.arg(0), i) + ")";
      case Op::Not: return mk_not(term(e.arg(0), i));
      case Op::Add: return bin("+", e, i);
      case Op::Sub: return bin("-", e, i);
      case Op::Mul:
        if (!is_constant(e.arg(0)) && !is_constant(e.arg(1)))
          throw Error("nonlinear multiplication is not supported by the SMT encoding: '" + to_source(e) + "'");
        return bin("*", e, i);
      case Op::Div:
        if (!is_constant(e.arg(1)))
          throw Error("division by a non-constant is not supported by the SMT encoding: '" + to_source(e) + "'");
        return bin(type(e) == TypeTag::Int ? "div" : "/", e, i);
      case Op::Or: return mk_or({term(e.arg(0), i), term(e.arg(1), i)});
      case Op::And: return mk_and({term(e.arg(0), i), term(e.arg(1), i)});
      case Op::Implies: return mk_or({mk_not(term(e.arg(0), i)), term(e.arg(1), i)});
      case Op::Eq: return equal(e.arg(0), e.arg(1), i);
      case Op::Neq: return mk_not(equal(e.arg(0), e.arg(1), i));
      case Op::Lt: return less(e.arg(0), e.arg(1), i, false);
      case Op::Le: return less(e.arg(0), e.arg(1), i, true);
      case Op::Gt: return less(e.arg(1), e.arg(0), i, false);
      case Op::Ge: return less(e.arg(1), e.arg(0), i, true);
      case Op::Ite: return mk_ite(term(e.arg(0), i), term(e.arg(1), i), term(e.arg(2), i));
      case Op::Arrow: return at_arrow(e, i, [&](const Expr& s, std::size_t k) { return term(s, k); });
      case Op::Pre:
        if (i > 0) return term(e.arg(0), i - 1);
        return pre_at_start(e.arg(0));
      case Op::Hist:
      case Op::Initz: break;
    }
    throw Error("internal: unexpected operator in SMT encoding: '" + to_source(e) + "'");
  }

  // Evaluation of `e` at i does not fail (arithmetic on infinity, division by
  // zero), following the evaluator's short-circuit order.
  std::string defined(const Expr& e, std::size_t i) {
    switch (e.op()) {
      case Op::Const:
      case Op::Var: return kTrue;
      case Op::Neg: return mk_and({defined(e.arg(0), i), finite(e.arg(0), i)});
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
        return mk_and({defined(e.arg(0), i), defined(e.arg(1), i), finite(e.arg(0), i), finite(e.arg(1), i)});
      case Op::Div:
        return mk_and({defined(e.arg(0), i), defined(e.arg(1), i), finite(e.arg(0), i), finite(e.arg(1), i),
                       mk_not("(= " + term(e.arg(1), i) + " " + rational_term(0, type(e) == TypeTag::Real) + ")")});
      case Op::Not: return defined(e.arg(0), i);
      case Op::And:
      case Op::Implies:
        return mk_and({defined(e.arg(0), i), mk_or({mk_not(term(e.arg(0), i)), defined(e.arg(1), i)})});
      case Op::Or: return mk_and({defined(e.arg(0), i), mk_or({term(e.arg(0), i), defined(e.arg(1), i)})});
      case Op::Eq:
      case Op::Neq:
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge: return mk_and({defined(e.arg(0), i), defined(e.arg(1), i)});
      case Op::Ite:
        return mk_and({defined(e.arg(0), i), mk_ite(term(e.arg(0), i), defined(e.arg(1), i), defined(e.arg(2), i))});
      case Op::Arrow: return at_arrow(e, i, [&](const Expr& s, std::size_t k) { return defined(s, k); });
      case Op::Pre: return i > 0 ? defined(e.arg(0), i - 1) : kTrue;
      case Op::Hist:
      case Op::Initz: break;
    }
    throw Error("internal: unexpected operator in SMT encoding: '" + to_source(e) + "'");
  }

  const std::vector<std::string>& declarations() const { return decls_; }
  const std::vector<std::string>& side_assertions() const { return side_; }

 private:
  template <class F>
  std::string at_arrow(const Expr& e, std::size_t i, F&& f) {
    if (i > 0) return f(e.arg(1), i);
    if (q_.from_initial) return f(e.arg(0), 0);
    return mk_ite(kInit, f(e.arg(0), 0), f(e.arg(1), 0));
  }

  std::string bin(const char* op, const Expr& e, std::size_t i) {
    return std::string("(") + op + " " + term(e.arg(0), i) + " " + term(e.arg(1), i) + ")";
  }

  TypeTag type(const Expr& e) const { return type_of(e, env_, true); }

  bool may_be_infinite(const Expr& e) const {
    switch (e.op()) {
      case Op::Const: return e.constant().is_infinity();
      case Op::Var: return p_.is_timeout(e.name());
      case Op::Pre: return may_be_infinite(e.arg(0));
      case Op::Ite: return may_be_infinite(e.arg(1)) || may_be_infinite(e.arg(2));
      case Op::Arrow: return may_be_infinite(e.arg(0)) || may_be_infinite(e.arg(1));
      default: return false;
    }
  }

  std::string infinite(const Expr& e, std::size_t i) {
    if (!may_be_infinite(e)) return kFalse;
    switch (e.op()) {
      case Op::Const: return kTrue;
      case Op::Var: return "(< " + term(e, i) + " 0.0)";
      case Op::Pre:
        if (i > 0) return infinite(e.arg(0), i - 1);
        return "(< " + pre_at_start(e.arg(0)) + " 0.0)";
      case Op::Ite: return mk_ite(term(e.arg(0), i), infinite(e.arg(1), i), infinite(e.arg(2), i));
      case Op::Arrow: return at_arrow(e, i, [&](const Expr& s, std::size_t k) { return infinite(s, k); });
      default: return kFalse;
    }
  }

  std::string finite(const Expr& e, std::size_t i) { return mk_not(infinite(e, i)); }

  std::string equal(const Expr& a, const Expr& b, std::size_t i) {
    std::string same = "(= " + term(a, i) + " " + term(b, i) + ")";
    std::string ia = infinite(a, i), ib = infinite(b, i);
    if (ia == kFalse && ib == kFalse) return same;
    return mk_ite(ia, ib, mk_and({mk_not(ib), same}));
  }

  // Orders values with infinity above every number.
  std::string less(const Expr& a, const Expr& b, std::size_t i, bool or_equal) {
    std::string cmp = std::string("(") + (or_equal ? "<=" : "<") + " " + term(a, i) + " " + term(b, i) + ")";
    std::string ia = infinite(a, i), ib = infinite(b, i);
    if (ia == kFalse && ib == kFalse) return cmp;
    if (or_equal) return mk_ite(ia, ib, mk_or({ib, cmp}));
    return mk_and({mk_not(ia), mk_or({ib, cmp})});
  }

  // The value of pre(arg) before an arbitrary first position is unconstrained.
  std::string pre_at_start(const Expr& arg) {
    if (q_.from_initial) throw Error("internal: 'pre' reached the initial position: '" + to_source(arg) + "'");
    std::string key = to_sexpr(arg);
    if (auto it = pre_.find(key); it != pre_.end()) return it->second;
    std::string sym = "|#pre" + std::to_string(pre_.size() + 1) + "|";
    pre_[key] = sym;
    decls_.push_back("(declare-fun " + sym + " () " + sort_of(type(arg)) + ")");
    if (may_be_infinite(arg)) side_.push_back("(or (>= " + sym + " 0.0) (= " + sym + " " + kInfinity + "))");
    return sym;
  }

  const SpecProgram& p_;
  const SmtQuery& q_;
  TypeEnv env_;
  std::map<std::string, std::string> pre_;
  std::vector<std::string> decls_;
  std::vector<std::string> side_;
};

std::string value_term(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: return v.as_bool() ? kTrue : kFalse;
    case Value::Kind::Int: return rational_term(v.as_rational(), false);
    case Value::Kind::Real: return rational_term(v.as_rational(), true);
    case Value::Kind::Infinity: return kInfinity;
  }
  return kFalse;
}

// t_now = t_prev + min_pos(to_k - t_prev), negative timeouts standing for
// infinity, as a nested ite chain over let-bound deltas.
std::string calendar(const std::string& now, const std::string& prev, const std::vector<std::string>& timeouts) {
  std::string deltas = "(let (";
  for (std::size_t k = 0; k < timeouts.size(); ++k)
    deltas += (k ? " " : "") + std::string("(d") + std::to_string(k) + " (ite (< " + timeouts[k] + " 0.0) " + kInfinity +
              " (- " + timeouts[k] + " " + prev + ")))";
  deltas += ") ";
  std::string chain = kInfinity;
  std::string body;
  int depth = 0;
  for (std::size_t k = 0; k < timeouts.size(); ++k) {
    std::string d = "d" + std::to_string(k);
    std::string m = "m" + std::to_string(k);
    body += "(let ((" + m + " (ite (and (> " + d + " 0.0) (or (<= " + chain + " 0.0) (< " + d + " " + chain + "))) " + d +
            " " + chain + "))) ";
    chain = m;
    ++depth;
  }
  return deltas + body + "(and (> " + chain + " 0.0) (= " + now + " (+ " + prev + " " + chain + ")))" +
         std::string(depth + 1, ')');
}

}  // namespace

SmtEncoder::SmtEncoder(SpecProgram p, const EnumerationDomain* domain) : p_(std::move(p)) {
  if (domain) {
    domain->validate();
    domain_ = *domain;
  }
}

std::string SmtEncoder::symbol(std::string_view var, std::size_t pos) {
  return "|" + std::string(var) + "@" + std::to_string(pos) + "|";
}

std::string SmtEncoder::script(const Expr& prop, const SmtQuery& q) const {
  if (q.length == 0) throw Error("unrolling length must be at least 1");
  SpecProgram p = p_;
  Lowering low(p);
  for (auto& c : p.transition) c.expr = low.lower(c.expr);
  Expr goal = low.lower(prop);
  std::vector<Expr> invariants;
  for (const auto& inv : q.invariants) invariants.push_back(low.lower(inv));
  low.flush();

  Unroller u(p, q);
  std::ostringstream body;
  const std::size_t n = q.length;
  auto assert_ = [&](const std::string& f) {
    if (f != kTrue) body << "(assert " << f << ")\n";
  };
  auto t = [&](std::size_t i) { return symbol(kTimeVar, i); };
  std::optional<StepPlan> plan;
  if (domain_) plan = plan_steps(p_);

  for (std::size_t i = 0; i < n; ++i) {
    body << "; position " << i << "\n";
    if (i == 0) {
      if (q.from_initial) {
        assert_("(= " + t(0) + " 0.0)");
      } else {
        assert_("(>= " + t(0) + " 0.0)");
        assert_("(=> " + kInit + " (= " + t(0) + " 0.0))");
      }
    } else {
      assert_("(> " + t(i) + " " + t(i - 1) + ")");
    }
    if (p.timed()) {
      std::vector<std::string> tos;
      for (const auto& name : p.timeouts) {
        tos.push_back(symbol(name, i));
        assert_("(or (>= " + tos.back() + " 0.0) (= " + tos.back() + " " + kInfinity + "))");
      }
      if (i > 0) {
        assert_(calendar(t(i), t(i - 1), tos));
      } else if (!q.from_initial) {
        assert_("(=> (not " + kInit + ") (and (>= " + kPrevTime + " 0.0) (< " + kPrevTime + " " + t(0) + ") " +
                calendar(t(0), kPrevTime, tos) + "))");
      }
    }
    for (const auto& c : p.transition) {
      body << "; " << c.name << "\n";
      assert_(u.holds(c.expr, i));
    }
    for (const auto& inv : invariants) assert_(u.holds(inv, i));
    if (plan) {
      for (const auto& a : plan->actions) {
        if (a.source == StepPlan::Source::Free) {
          auto values = free_values(p_, *plan, a.slot, *domain_);
          if (p_.find(plan->vars[a.slot - 1])->type == TypeTag::Bool) continue;
          std::vector<std::string> alts;
          for (const auto& v : values) alts.push_back("(= " + symbol(plan->vars[a.slot - 1], i) + " " + value_term(v) + ")");
          assert_(mk_or(alts));
        } else if (a.source == StepPlan::Source::FreeClock && i > 0) {
          std::vector<std::string> alts;
          for (const auto& d : domain_->time_deltas)
            alts.push_back("(= " + t(i) + " (+ " + t(i - 1) + " " + rational_term(d, true) + "))");
          assert_(mk_or(alts));
        }
      }
    }
  }
  body << "; property\n";
  if (q.violate_any) {
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < n; ++i) bad.push_back(mk_not(u.holds(goal, i)));
    assert_(mk_or(bad));
  } else {
    if (q.assume_before)
      for (std::size_t i = 0; i + 1 < n; ++i) assert_(u.holds(goal, i));
    assert_(mk_not(u.holds(goal, n - 1)));
  }

  std::ostringstream out;
  out << "; rtc unrolling: " << n << " position" << (n == 1 ? "" : "s") << ", "
      << (q.from_initial ? "initial start" : "arbitrary start") << "\n";
  out << "(set-option :produce-models true)\n(set-logic QF_LIRA)\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "(declare-fun " << t(i) << " () Real)\n";
    for (const auto& v : p.vars) out << "(declare-fun " << symbol(v.name, i) << " () " << sort_of(v.type) << ")\n";
  }
  if (!q.from_initial) {
    out << "(declare-fun " << kInit << " () Bool)\n";
    if (p.timed()) out << "(declare-fun " << kPrevTime << " () Real)\n";
  }
  for (const auto& d : u.declarations()) out << d << "\n";
  for (const auto& s : u.side_assertions()) out << "(assert " << s << ")\n";
  out << body.str();
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

TimedTrace SmtEncoder::decode(const SmtModel& m, std::size_t length) const {
  std::vector<std::string> names;
  for (const auto& v : p_.vars) names.push_back(v.name);
  TimedTrace tr(names);
  auto lookup = [&](const std::string& name, std::size_t i) -> const std::string* {
    auto it = m.values.find(name + "@" + std::to_string(i));
    return it == m.values.end() ? nullptr : &it->second;
  };
  for (std::size_t i = 0; i < length; ++i) {
    std::map<std::string, Value> row;
    for (const auto& v : p_.vars) {
      const std::string* s = lookup(v.name, i);
      switch (v.type) {
        case TypeTag::Bool: row[v.name] = Value::boolean(s && *s == "true"); break;
        case TypeTag::Int: row[v.name] = Value::integer(s ? parse_rational(*s) : Rational(0)); break;
        case TypeTag::Real: {
          Rational q = s ? parse_rational(*s) : Rational(0);
          row[v.name] = (q < 0 && p_.is_timeout(v.name)) ? Value::infinity() : Value::real(q);
          break;
        }
      }
    }
    const std::string* ts = lookup(std::string(kTimeVar), i);
    tr.push(ts ? parse_rational(*ts) : Rational(0), row);
  }
  return tr;
}

std::string emit_smtlib(const SpecProgram& p, const Expr& prop, SmtMode mode, std::size_t k) {
  if (k < 1) throw Error("bound must be at least 1");
  SmtEncoder enc(p);
  SmtQuery q;
  if (mode == SmtMode::Bmc) {
    q.length = k;
    q.assume_before = false;
    q.violate_any = true;
  } else {
    q.length = k + 1;
    q.from_initial = false;
    for (const auto& l : p.lemmas) q.invariants.push_back(l.expr);
  }
  return enc.script(prop, q);
}

}  // namespace rtc
