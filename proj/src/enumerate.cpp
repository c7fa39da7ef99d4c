#include "rtc/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rtc/semantics.hpp"

namespace rtc {

void EnumerationDomain::validate() const {
  if (horizon < 1) throw Error("horizon must be at least 1");
  if (time_deltas.empty() || int_grid.empty() || real_grid.empty()) throw Error("enumeration grids must be nonempty");
  for (const auto& d : time_deltas)
    if (d <= 0) throw Error("time deltas must be strictly positive");
  for (const auto& v : int_grid)
    if (v.get_den() != 1) throw Error("integer grid holds a non-integer value");
}

bool StepPlan::is_free(std::size_t slot) const {
  for (const auto& a : actions)
    if (a.slot == slot) return a.source == Source::Free || a.source == Source::FreeClock;
  return false;
}

StepPlan plan_steps(const SpecProgram& p) {
  StepPlan plan;
  std::map<std::string, std::size_t> slot_of{{std::string(kTimeVar), 0}};
  for (const auto& v : p.vars) {
    plan.vars.push_back(v.name);
    slot_of[v.name] = plan.vars.size();
  }
  std::size_t n = plan.vars.size() + 1;

  // Candidate definitions, first one per variable wins.
  std::vector<std::optional<std::size_t>> def(n);  // index into p.transition
  for (std::size_t k = 0; k < p.transition.size(); ++k) {
    const Expr& c = p.transition[k].expr;
    if (c.op() != Op::Eq || c.arg(0).op() != Op::Var) continue;
    auto it = slot_of.find(c.arg(0).name());
    if (it == slot_of.end() || def[it->second]) continue;
    if (it->second == 0 && p.timed()) continue;
    if (current_vars(c.arg(1)).count(c.arg(0).name())) continue;
    def[it->second] = k;
  }

  auto deps_of = [&](std::size_t s) {
    std::vector<std::size_t> out;
    if (s == 0 && p.timed()) {
      for (const auto& to : p.timeouts) out.push_back(slot_of.at(to));
    } else if (def[s]) {
      for (const auto& name : current_vars(p.transition[*def[s]].expr.arg(1))) out.push_back(slot_of.at(name));
    }
    return out;
  };
  auto computed = [&](std::size_t s) { return def[s].has_value() || (s == 0 && p.timed()); };

  // Kahn's algorithm; a cycle demotes its lowest slot to a free variable.
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  for (;;) {
    bool progress = false, remaining = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (placed[s] || !computed(s)) continue;
      remaining = true;
      bool ready = true;
      for (auto d : deps_of(s))
        if (d != s && computed(d) && !placed[d]) ready = false;
      if (ready) {
        placed[s] = true;
        order.push_back(s);
        progress = true;
      }
    }
    if (!remaining) break;
    if (!progress) {
      for (std::size_t s = 1; s < n; ++s)
        if (!placed[s] && def[s]) {
          def[s].reset();
          break;
        }
    }
  }

  std::vector<bool> used(p.transition.size(), false);
  if (!computed(0)) plan.actions.push_back({0, StepPlan::Source::FreeClock, {}});
  for (std::size_t s = 1; s < n; ++s)
    if (!computed(s)) plan.actions.push_back({s, StepPlan::Source::Free, {}});
  for (auto s : order) {
    if (s == 0 && p.timed()) {
      plan.actions.push_back({0, StepPlan::Source::Calendar, {}});
    } else {
      used[*def[s]] = true;
      plan.actions.push_back({s, StepPlan::Source::Defined, p.transition[*def[s]].expr.arg(1)});
    }
  }
  for (std::size_t k = 0; k < p.transition.size(); ++k)
    if (!used[k]) plan.filters.push_back(p.transition[k]);
  return plan;
}

std::vector<Value> free_values(const SpecProgram& p, const StepPlan& plan, std::size_t slot,
                               const EnumerationDomain& dom) {
  const VarDecl* v = p.find(plan.vars.at(slot - 1));
  std::vector<Value> out;
  switch (v->type) {
    case TypeTag::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case TypeTag::Int:
      for (const auto& q : dom.int_grid) out.push_back(Value::integer(q));
      break;
    case TypeTag::Real:
      for (const auto& q : dom.real_grid) out.push_back(Value::real(q));
      if (p.is_timeout(v->name)) out.push_back(Value::infinity());
      break;
  }
  return out;
}

namespace {

Value default_value(TypeTag t) {
  switch (t) {
    case TypeTag::Bool: return Value::boolean(false);
    case TypeTag::Int: return Value::integer(0L);
    case TypeTag::Real: return Value::real(0);
  }
  return {};
}

}  // namespace

TraceEnumerator::TraceEnumerator(const SpecProgram& p, EnumerationDomain dom)
    : p_(p), dom_(std::move(dom)), plan_(plan_steps(p)), tr_(plan_.vars), limit_(dom_.horizon) {
  dom_.validate();
}

long double TraceEnumerator::estimate() const {
  long double branch = 1;
  for (const auto& a : plan_.actions) {
    if (a.source == StepPlan::Source::Free) branch *= free_values(p_, plan_, a.slot, dom_).size();
    if (a.source == StepPlan::Source::FreeClock) branch *= dom_.time_deltas.size();
  }
  long double total = 0, level = 1;
  for (std::size_t d = 0; d < dom_.horizon; ++d) total += (level *= branch);
  return total;
}

void TraceEnumerator::run(const Visitor& visit) {
  visited_ = 0;
  extend(visit);
}

bool TraceEnumerator::extend(const Visitor& visit) {
  std::vector<Value> row(plan_.vars.size() + 1);
  row[0] = Value::real(0);
  for (std::size_t s = 1; s < row.size(); ++s) row[s] = default_value(p_.find(plan_.vars[s - 1])->type);
  tr_.push_row(std::move(row));
  bool go = assign(0, visit);
  tr_.pop();
  return go;
}

bool TraceEnumerator::assign(std::size_t idx, const Visitor& visit) {
  if (idx == plan_.actions.size()) return finish_step(visit);
  const auto& a = plan_.actions[idx];
  std::size_t i = tr_.length();
  auto try_value = [&](Value v) {
    tr_.mutable_row(i)[a.slot] = std::move(v);
    return assign(idx + 1, visit);
  };
  switch (a.source) {
    case StepPlan::Source::Free:
      for (auto& v : free_values(p_, plan_, a.slot, dom_))
        if (!try_value(v)) return false;
      return true;
    case StepPlan::Source::FreeClock:
      if (i == 1) return try_value(Value::real(0));
      for (const auto& d : dom_.time_deltas)
        if (!try_value(Value::real(tr_.time(i - 1) + d))) return false;
      return true;
    case StepPlan::Source::Defined:
      try {
        Value v = eval_expr(a.rhs, tr_, i);
        if (v.kind() == Value::Kind::Int && p_.find(plan_.vars[a.slot - 1])->type == TypeTag::Real) return true;
        return try_value(std::move(v));
      } catch (const EvalError&) {
        return true;
      }
    case StepPlan::Source::Calendar: {
      Calendar cal = calendar_at(p_, tr_, i);
      for (const auto& to : cal.timeouts)
        if (!to.is_infinity() && to.as_rational() < 0) return true;
      if (i == 1) return try_value(Value::real(0));
      try {
        return try_value(Value::real(advance_time(tr_.time(i - 1), cal)));
      } catch (const CalendarExhausted&) {
        return true;
      }
    }
  }
  return true;
}

bool TraceEnumerator::finish_step(const Visitor& visit) {
  std::size_t i = tr_.length();
  if (i == 1 ? tr_.time(1) != 0 : tr_.time(i) <= tr_.time(i - 1)) return true;
  try {
    for (const auto& f : plan_.filters)
      if (!eval_bool(f.expr, tr_, i)) return true;
  } catch (const EvalError&) {
    return true;
  }
  if (++visited_ > dom_.ceiling) {
    throw DomainExplosion("enumeration ceiling of " + std::to_string(dom_.ceiling) +
                          " prefixes exceeded (domain estimate ~" +
                          std::to_string(static_cast<double>(estimate())) + ")");
  }
  if (!visit(tr_)) return false;
  if (i < limit_) return extend(visit);
  return true;
}

std::vector<TimedTrace> enumerate_traces(const SpecProgram& p, const EnumerationDomain& dom) {
  std::vector<TimedTrace> out;
  TraceEnumerator en(p, dom);
  en.run([&](const TimedTrace& tr) {
    if (tr.length() == dom.horizon) out.push_back(tr);
    return true;
  });
  return out;
}

Simulation simulate(const SpecProgram& p, const TimedTrace& inputs, std::size_t steps) {
  if (steps == 0) steps = inputs.length();
  StepPlan plan = plan_steps(p);
  Simulation out{TimedTrace(plan.vars), std::nullopt};
  TimedTrace& tr = out.trace;
  auto given = [&](std::size_t i, std::size_t slot) -> std::optional<Value> {
    if (i > inputs.length()) return std::nullopt;
    auto s = inputs.slot(slot == 0 ? std::string(kTimeVar) : plan.vars[slot - 1]);
    if (!s) return std::nullopt;
    return inputs.at_slot(i, *s);
  };
  for (std::size_t i = 1; i <= steps; ++i) {
    std::vector<Value> row(plan.vars.size() + 1);
    row[0] = Value::real(0);
    for (std::size_t s = 1; s < row.size(); ++s) row[s] = default_value(p.find(plan.vars[s - 1])->type);
    tr.push_row(std::move(row));
    try {
      for (const auto& a : plan.actions) {
        if (auto v = given(i, a.slot)) {
          tr.mutable_row(i)[a.slot] = *v;
          continue;
        }
        switch (a.source) {
          case StepPlan::Source::Free:
            throw Error("no value supplied for free variable '" + plan.vars[a.slot - 1] + "' at step " +
                        std::to_string(i));
          case StepPlan::Source::FreeClock:
            if (i > 1) throw Error("no time value supplied at step " + std::to_string(i));
            break;
          case StepPlan::Source::Defined:
            tr.mutable_row(i)[a.slot] = eval_expr(a.rhs, tr, i);
            break;
          case StepPlan::Source::Calendar:
            if (i > 1) tr.mutable_row(i)[0] = Value::real(advance_time(tr.time(i - 1), calendar_at(p, tr, i)));
            break;
        }
      }
    } catch (const CalendarExhausted& ex) {
      out.violation = Violation{i, std::string(kCalendar), ex.what()};
      return out;
    } catch (const EvalError& ex) {
      out.violation = Violation{i, "evaluation", ex.what()};
      return out;
    }
    if (auto v = step_admissible(p, tr, i)) {
      out.violation = v;
      return out;
    }
  }
  return out;
}

}  // namespace rtc
