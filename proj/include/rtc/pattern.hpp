#pragma once

#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "rtc/expr.hpp"

namespace rtc {

/// Elapsed-time window measured from a triggering occurrence.
struct Interval {
  Rational low;
  Rational high;
  bool low_closed = true;
  bool high_closed = true;

  bool above_low(const Rational& elapsed) const { return low_closed ? elapsed >= low : elapsed > low; }
  bool below_high(const Rational& elapsed) const { return high_closed ? elapsed <= high : elapsed < high; }
  bool contains(const Rational& elapsed) const { return above_low(elapsed) && below_high(elapsed); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// whenever c occurs [exclusively] e occurs during iv
struct WheneverEventEvent {
  Expr cause;
  Expr effect;
  Interval window;
  bool exclusive = false;
  friend bool operator==(const WheneverEventEvent&, const WheneverEventEvent&) = default;
};

/// whenever c occurs cond holds during iv
struct WheneverEventCondition {
  Expr cause;
  Expr condition;
  Interval window;
  friend bool operator==(const WheneverEventCondition&, const WheneverEventCondition&) = default;
};

/// when cond holds during cond_window e occurs during window
struct WhenConditionEvent {
  Expr condition;
  Interval cond_window;
  Expr effect;
  Interval window;
  friend bool operator==(const WhenConditionEvent&, const WhenConditionEvent&) = default;
};

/// always cond
struct Always {
  Expr condition;
  friend bool operator==(const Always&, const Always&) = default;
};

/// e occurs each period [with jitter j]
struct Periodic {
  Expr event;
  Rational period;
  Rational jitter;
  friend bool operator==(const Periodic&, const Periodic&) = default;
};

/// e occurs sporadic with IAT iat [and jitter j]
struct Sporadic {
  Expr event;
  Rational iat;
  Rational jitter;
  friend bool operator==(const Sporadic&, const Sporadic&) = default;
};

using Pattern =
    std::variant<WheneverEventEvent, WheneverEventCondition, WhenConditionEvent, Always, Periodic, Sporadic>;

/// Parses one pattern phrase. Throws SyntaxError / Error.
Pattern parse_pattern(std::string_view text);

/// Throws Error when bounds or rates violate the pattern invariants.
void validate(const Pattern& p);

std::string to_source(const Pattern& p);
std::string_view pattern_kind(const Pattern& p);
/// Variables read by the pattern's expressions.
std::set<std::string> pattern_vars(const Pattern& p);

}  // namespace rtc
