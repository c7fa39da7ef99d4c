#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtc/program.hpp"
#include "rtc/value.hpp"

namespace rtc {

/// Paired state and time sequences. Step indices are 1-based; slot 0 of
/// every state holds the clock `t`.
class TimedTrace {
 public:
  TimedTrace() : TimedTrace(std::vector<std::string>{}) {}
  /// `vars` excludes `t`, which is always present.
  explicit TimedTrace(std::vector<std::string> vars);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t length() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Appends a step; `state` maps every variable (and optionally "t").
  void push(const Rational& time, const std::map<std::string, Value>& state);
  void push_row(std::vector<Value> row);
  void pop() { rows_.pop_back(); }

  const Rational& time(std::size_t step) const { return row(step)[0].as_rational(); }
  const Value& at(std::size_t step, std::string_view name) const;
  const Value& at_slot(std::size_t step, std::size_t slot) const { return row(step)[slot]; }
  std::optional<std::size_t> slot(std::string_view name) const;
  bool has(std::string_view name) const { return slot(name).has_value(); }
  const std::vector<Value>& row(std::size_t step) const;
  std::vector<Value>& mutable_row(std::size_t step);

  /// Keeps only the listed variables (plus `t`).
  TimedTrace project(const std::vector<std::string>& keep) const;

  friend bool operator==(const TimedTrace& a, const TimedTrace& b);

 private:
  std::vector<std::string> vars_;
  std::unordered_map<std::string, std::size_t> slots_;
  std::vector<std::vector<Value>> rows_;
};

/// Trace JSON: {"vars":[...],"steps":[{"t":"15/1","x":...},...]}. Reals are
/// "num/den" strings, integers are decimal strings, infinity is "inf".
std::string trace_to_json(const TimedTrace& tr, int indent = -1);
TimedTrace trace_from_json(std::string_view text);
/// Re-tags integer literals of real-typed variables as reals.
TimedTrace coerce_to_program(const TimedTrace& tr, const SpecProgram& p);

}  // namespace rtc
