#include "rtc/semantics.hpp"

namespace rtc {

namespace {

Rational euclidean_div(const Rational& a, const Rational& b) {
  mpz_class n = a.get_num(), d = b.get_num();
  mpz_class abs_d = abs(d);
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), abs_d.get_mpz_t());
  return Rational(mpz_class((n - r) / d));
}

int compare(const Value& a, const Value& b) {
  if (a.is_infinity() || b.is_infinity()) {
    if (a.is_infinity() && b.is_infinity()) return 0;
    return a.is_infinity() ? 1 : -1;
  }
  return cmp(a.as_rational(), b.as_rational());
}

Value numeric(const Value& like, const Rational& q) {
  return like.kind() == Value::Kind::Int ? Value::integer(q) : Value::real(q);
}

class Evaluator {
 public:
  explicit Evaluator(const TimedTrace& tr) : tr_(tr) {}

  Value eval(const Expr& e, std::size_t i) const {
    switch (e.op()) {
      case Op::Const: return e.constant();
      case Op::Var: {
        auto s = tr_.slot(e.name());
        if (!s) throw EvalError("trace has no variable '" + e.name() + "'");
        return tr_.at_slot(i, *s);
      }
      case Op::Neg: {
        Value a = finite(eval(e.arg(0), i), e);
        return numeric(a, -a.as_rational());
      }
      case Op::Not: return Value::boolean(!eval(e.arg(0), i).as_bool());
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
        Value a = finite(eval(e.arg(0), i), e);
        Value b = finite(eval(e.arg(1), i), e);
        const Rational& x = a.as_rational();
        const Rational& y = b.as_rational();
        switch (e.op()) {
          case Op::Add: return numeric(a, x + y);
          case Op::Sub: return numeric(a, x - y);
          case Op::Mul: return numeric(a, x * y);
          default:
            if (y == 0) throw EvalError("division by zero in '" + to_source(e) + "'");
            if (a.kind() == Value::Kind::Int) return Value::integer(euclidean_div(x, y));
            return Value::real(x / y);
        }
      }
      case Op::Or: return Value::boolean(eval(e.arg(0), i).as_bool() || eval(e.arg(1), i).as_bool());
      case Op::And: return Value::boolean(eval(e.arg(0), i).as_bool() && eval(e.arg(1), i).as_bool());
      case Op::Implies: return Value::boolean(!eval(e.arg(0), i).as_bool() || eval(e.arg(1), i).as_bool());
      case Op::Eq: return Value::boolean(eval(e.arg(0), i) == eval(e.arg(1), i));
      case Op::Neq: return Value::boolean(eval(e.arg(0), i) != eval(e.arg(1), i));
      case Op::Lt: return Value::boolean(compare(eval(e.arg(0), i), eval(e.arg(1), i)) < 0);
      case Op::Le: return Value::boolean(compare(eval(e.arg(0), i), eval(e.arg(1), i)) <= 0);
      case Op::Gt: return Value::boolean(compare(eval(e.arg(0), i), eval(e.arg(1), i)) > 0);
      case Op::Ge: return Value::boolean(compare(eval(e.arg(0), i), eval(e.arg(1), i)) >= 0);
      case Op::Ite: return eval(e.arg(0), i).as_bool() ? eval(e.arg(1), i) : eval(e.arg(2), i);
      case Op::Arrow: return i == 1 ? eval(e.arg(0), i) : eval(e.arg(1), i);
      case Op::Pre:
        if (i <= 1) throw EvalError("'pre' evaluated at the initial step: '" + to_source(e) + "'");
        return eval(e.arg(0), i - 1);
      case Op::Hist: {
        for (std::size_t k = 1; k <= i; ++k)
          if (!eval(e.arg(0), k).as_bool()) return Value::boolean(false);
        return Value::boolean(true);
      }
      case Op::Initz: return Value::boolean(i == 1 || eval(e.arg(0), i - 1).as_bool());
    }
    throw EvalError("unsupported expression");
  }

 private:
  static const Value& finite(const Value& v, const Expr& e) {
    if (v.is_infinity()) throw EvalError("arithmetic on infinity in '" + to_source(e) + "'");
    return v;
  }

  const TimedTrace& tr_;
};

}  // namespace

Value eval_expr(const Expr& e, const TimedTrace& tr, std::size_t i) {
  if (i < 1 || i > tr.length()) throw EvalError("step " + std::to_string(i) + " outside trace");
  return Evaluator(tr).eval(e, i);
}

bool eval_bool(const Expr& e, const TimedTrace& tr, std::size_t i) { return eval_expr(e, tr, i).as_bool(); }

bool eval_historically(const Expr& e, const TimedTrace& tr, std::size_t i) {
  for (std::size_t k = 1; k <= i; ++k)
    if (!eval_bool(e, tr, k)) return false;
  return true;
}

bool eval_z(const Expr& e, const TimedTrace& tr, std::size_t i) { return i == 1 || eval_bool(e, tr, i - 1); }

Rational min_pos(std::span<const Value> deltas) {
  std::optional<Rational> best;
  for (const auto& d : deltas) {
    if (d.is_infinity()) continue;
    const Rational& q = d.as_rational();
    if (q > 0 && (!best || q < *best)) best = q;
  }
  if (!best) throw CalendarExhausted("calendar exhausted: no timeout lies strictly in the future");
  return *best;
}

Rational advance_time(const std::optional<Rational>& prev_t, const Calendar& cal) {
  if (!prev_t) return Rational(0);
  std::vector<Value> deltas;
  deltas.reserve(cal.timeouts.size());
  for (const auto& to : cal.timeouts)
    deltas.push_back(to.is_infinity() ? to : Value::real(to.as_rational() - *prev_t));
  return *prev_t + min_pos(deltas);
}

Calendar calendar_at(const SpecProgram& p, const TimedTrace& tr, std::size_t i) {
  Calendar cal;
  for (const auto& name : p.timeouts) cal.timeouts.push_back(tr.at(i, name));
  return cal;
}

std::optional<Violation> step_admissible(const SpecProgram& p, const TimedTrace& tr, std::size_t i) {
  const Rational& now = tr.time(i);
  if (i == 1) {
    if (now != 0) return Violation{i, std::string(kTimeProgress), "time must start at 0"};
  } else {
    const Rational& prev = tr.time(i - 1);
    if (now <= prev) return Violation{i, std::string(kTimeProgress), "time must strictly increase"};
  }
  if (p.timed()) {
    Calendar cal = calendar_at(p, tr, i);
    for (std::size_t k = 0; k < cal.timeouts.size(); ++k) {
      const Value& v = cal.timeouts[k];
      if (!v.is_infinity() && v.as_rational() < 0)
        return Violation{i, std::string(kCalendar), "timeout '" + p.timeouts[k] + "' must not be negative"};
    }
    if (i > 1) {
      try {
        Rational expected = advance_time(tr.time(i - 1), cal);
        if (expected != now)
          return Violation{i, std::string(kCalendar),
                           "t must equal the least pending timeout " + rational_to_fraction(expected)};
      } catch (const CalendarExhausted& ex) {
        return Violation{i, std::string(kCalendar), ex.what()};
      }
    }
  }
  for (const auto& c : p.transition) {
    try {
      if (!eval_bool(c.expr, tr, i)) return Violation{i, c.name, to_source(c.expr)};
    } catch (const EvalError& ex) {
      return Violation{i, c.name, ex.what()};
    }
  }
  return std::nullopt;
}

std::optional<Violation> trace_admissible(const SpecProgram& p, const TimedTrace& tr) {
  for (const auto& v : p.vars) {
    if (!tr.has(v.name)) throw Error("trace does not cover variable '" + v.name + "'");
  }
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    for (const auto& v : p.vars) {
      const Value& val = tr.at(i, v.name);
      bool ok = (v.type == TypeTag::Bool && val.kind() == Value::Kind::Bool) ||
                (v.type == TypeTag::Int && val.kind() == Value::Kind::Int) ||
                (v.type == TypeTag::Real && (val.kind() == Value::Kind::Real ||
                                              (val.is_infinity() && p.is_timeout(v.name))));
      if (!ok) throw Error("step " + std::to_string(i) + ": value " + val.to_string() + " does not match type of '" +
                           v.name + "'");
    }
    if (auto viol = step_admissible(p, tr, i)) return viol;
  }
  return std::nullopt;
}

std::optional<std::size_t> check_invariant_on_trace(const Expr& prop, const TimedTrace& tr) {
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    try {
      if (!eval_bool(prop, tr, i)) return i;
    } catch (const EvalError&) {
      return i;
    }
  }
  return std::nullopt;
}

bool time_diverges(const TimedTrace& tr, const Rational& threshold) {
  return !tr.empty() && tr.time(tr.length()) >= threshold;
}

}  // namespace rtc
