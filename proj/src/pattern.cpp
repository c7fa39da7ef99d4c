#include "rtc/pattern.hpp"

namespace rtc {

namespace {

std::string num(const Rational& q) {
  if (auto d = rational_to_decimal(q)) return *d;
  return "frac(" + q.get_num().get_str() + ", " + q.get_den().get_str() + ")";
}

std::string interval_source(const Interval& iv) {
  return std::string(iv.low_closed ? "[" : "(") + num(iv.low) + ", " + num(iv.high) + (iv.high_closed ? "]" : ")");
}

// Pattern operands sit between keywords; parenthesize anything that is not
// an atom so `and`/`or` inside cannot be mistaken for pattern syntax.
std::string operand(const Expr& e) {
  std::string s = to_source(e);
  if (e.op() == Op::Var || e.op() == Op::Const) return s;
  if (e.op() == Op::Eq || e.op() == Op::Neq || e.op() == Op::Lt || e.op() == Op::Le || e.op() == Op::Gt ||
      e.op() == Op::Ge)
    return s;
  return "(" + s + ")";
}

void check_interval(const Interval& iv) {
  if (iv.low < 0 || iv.high < 0) throw Error("interval bounds must be nonnegative");
  if (iv.low > iv.high) throw Error("interval lower bound exceeds upper bound");
}

}  // namespace

void validate(const Pattern& p) {
  std::visit(
      [](const auto& pat) {
        using T = std::decay_t<decltype(pat)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent> || std::is_same_v<T, WheneverEventCondition>) {
          check_interval(pat.window);
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          check_interval(pat.cond_window);
          check_interval(pat.window);
        } else if constexpr (std::is_same_v<T, Periodic>) {
          if (pat.period <= 0) throw Error("period must be positive");
          if (pat.jitter < 0) throw Error("jitter must be nonnegative");
          if (pat.jitter * 2 >= pat.period) throw Error("periodic jitter must be less than half the period");
        } else if constexpr (std::is_same_v<T, Sporadic>) {
          if (pat.iat <= 0) throw Error("IAT must be positive");
          if (pat.jitter < 0) throw Error("jitter must be nonnegative");
        }
      },
      p);
}

std::set<std::string> pattern_vars(const Pattern& p) {
  std::set<std::string> out;
  auto add = [&](const Expr& e) {
    auto vs = referenced_vars(e);
    out.insert(vs.begin(), vs.end());
  };
  std::visit(
      [&](const auto& pat) {
        using T = std::decay_t<decltype(pat)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent>) {
          add(pat.cause);
          add(pat.effect);
        } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
          add(pat.cause);
          add(pat.condition);
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          add(pat.condition);
          add(pat.effect);
        } else if constexpr (std::is_same_v<T, Always>) {
          add(pat.condition);
        } else {
          add(pat.event);
        }
      },
      p);
  return out;
}

std::string to_source(const Pattern& p) {
  return std::visit(
      [](const auto& pat) -> std::string {
        using T = std::decay_t<decltype(pat)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent>) {
          return "whenever " + operand(pat.cause) + " occurs " + operand(pat.effect) +
                 (pat.exclusive ? " exclusively" : "") + " occurs during " + interval_source(pat.window);
        } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
          return "whenever " + operand(pat.cause) + " occurs " + operand(pat.condition) + " holds during " +
                 interval_source(pat.window);
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          return "when " + operand(pat.condition) + " holds during " + interval_source(pat.cond_window) + " " +
                 operand(pat.effect) + " occurs during " + interval_source(pat.window);
        } else if constexpr (std::is_same_v<T, Always>) {
          return "always " + to_source(pat.condition);
        } else if constexpr (std::is_same_v<T, Periodic>) {
          std::string s = operand(pat.event) + " occurs each " + num(pat.period);
          if (pat.jitter != 0) s += " with jitter " + num(pat.jitter);
          return s;
        } else {
          std::string s = operand(pat.event) + " occurs sporadic with IAT " + num(pat.iat);
          if (pat.jitter != 0) s += " and jitter " + num(pat.jitter);
          return s;
        }
      },
      p);
}

std::string_view pattern_kind(const Pattern& p) {
  static constexpr std::string_view names[] = {"whenever-event-event", "whenever-event-condition",
                                                "when-condition-event", "always", "periodic", "sporadic"};
  return names[p.index()];
}

}  // namespace rtc
