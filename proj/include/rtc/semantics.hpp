#pragma once

#include <optional>
#include <span>
#include <string>

#include "rtc/program.hpp"
#include "rtc/trace.hpp"

namespace rtc {

/// Value of `e` at 1-based step `i` of `tr`. `->` picks its left operand at
/// step 1; `pre` reads step i-1 and is a hard error at step 1.
Value eval_expr(const Expr& e, const TimedTrace& tr, std::size_t i);
bool eval_bool(const Expr& e, const TimedTrace& tr, std::size_t i);

/// Historically: `e` held at every step 1..i.
bool eval_historically(const Expr& e, const TimedTrace& tr, std::size_t i);
/// True at step 1, otherwise the value of `e` at step i-1.
bool eval_z(const Expr& e, const TimedTrace& tr, std::size_t i);

/// Current timeout values (finite rationals or Infinity).
struct Calendar {
  std::vector<Value> timeouts;
};

/// Least strictly positive finite delta; throws CalendarExhausted if none.
Rational min_pos(std::span<const Value> deltas);

/// Next clock value: 0 at the initial step (no `prev_t`), otherwise
/// prev_t + min_pos(timeout - prev_t).
Rational advance_time(const std::optional<Rational>& prev_t, const Calendar& cal);

/// The calendar of program `p` at step `i` of `tr`.
Calendar calendar_at(const SpecProgram& p, const TimedTrace& tr, std::size_t i);

struct Violation {
  std::size_t step = 0;
  std::string constraint;
  std::string detail;
};

/// Implicit constraint names used in violation reports.
inline constexpr std::string_view kTimeProgress = "time-progress";
inline constexpr std::string_view kCalendar = "calendar";

/// First (step, constraint) at which `tr` breaks the transition relation of
/// `p`, including the clock rules: t starts at 0 and strictly increases, and
/// for timed programs t follows the calendar. nullopt means admissible.
std::optional<Violation> trace_admissible(const SpecProgram& p, const TimedTrace& tr);

/// Admissibility of step `i` alone, assuming steps 1..i-1 were admissible.
std::optional<Violation> step_admissible(const SpecProgram& p, const TimedTrace& tr, std::size_t i);

/// First step where `prop` is false or undefined, or nullopt if it holds
/// throughout.
std::optional<std::size_t> check_invariant_on_trace(const Expr& prop, const TimedTrace& tr);

/// Divergence check for bounded traces: has the clock reached `threshold`?
bool time_diverges(const TimedTrace& tr, const Rational& threshold);

}  // namespace rtc
