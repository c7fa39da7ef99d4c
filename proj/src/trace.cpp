#include "rtc/trace.hpp"

#include <json.hpp>

namespace rtc {

TimedTrace::TimedTrace(std::vector<std::string> vars) : vars_(std::move(vars)) {
  slots_[std::string(kTimeVar)] = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == kTimeVar) throw Error("'t' must not be listed as a trace variable");
    if (!slots_.emplace(vars_[i], i + 1).second) throw Error("duplicate trace variable '" + vars_[i] + "'");
  }
}

void TimedTrace::push(const Rational& time, const std::map<std::string, Value>& state) {
  std::vector<Value> r(vars_.size() + 1);
  r[0] = Value::real(time);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = state.find(vars_[i]);
    if (it == state.end()) throw Error("state is missing variable '" + vars_[i] + "'");
    r[i + 1] = it->second;
  }
  rows_.push_back(std::move(r));
}

void TimedTrace::push_row(std::vector<Value> row) {
  if (row.size() != vars_.size() + 1) throw Error("trace row has wrong width");
  rows_.push_back(std::move(row));
}

std::optional<std::size_t> TimedTrace::slot(std::string_view name) const {
  auto it = slots_.find(std::string(name));
  if (it == slots_.end()) return std::nullopt;
  return it->second;
}

const std::vector<Value>& TimedTrace::row(std::size_t step) const {
  if (step < 1 || step > rows_.size()) throw EvalError("step " + std::to_string(step) + " outside trace");
  return rows_[step - 1];
}

std::vector<Value>& TimedTrace::mutable_row(std::size_t step) {
  if (step < 1 || step > rows_.size()) throw EvalError("step " + std::to_string(step) + " outside trace");
  return rows_[step - 1];
}

const Value& TimedTrace::at(std::size_t step, std::string_view name) const {
  auto s = slot(name);
  if (!s) throw EvalError("trace has no variable '" + std::string(name) + "'");
  return row(step)[*s];
}

TimedTrace TimedTrace::project(const std::vector<std::string>& keep) const {
  TimedTrace out(keep);
  std::vector<std::size_t> src;
  for (const auto& k : keep) {
    auto s = slot(k);
    if (!s) throw Error("cannot project onto unknown variable '" + k + "'");
    src.push_back(*s);
  }
  for (const auto& r : rows_) {
    std::vector<Value> nr;
    nr.reserve(keep.size() + 1);
    nr.push_back(r[0]);
    for (auto s : src) nr.push_back(r[s]);
    out.rows_.push_back(std::move(nr));
  }
  return out;
}

bool operator==(const TimedTrace& a, const TimedTrace& b) { return a.vars_ == b.vars_ && a.rows_ == b.rows_; }

namespace {

nlohmann::json value_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: return v.as_bool();
    default: return v.to_string();
  }
}

Value value_from_json(const nlohmann::json& j, const std::string& where) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(parse_rational(j.dump()));
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return Value::infinity();
    if (s.find('/') != std::string::npos || s.find('.') != std::string::npos) return Value::real(parse_rational(s));
    return Value::integer(parse_rational(s));
  }
  throw Error("unsupported JSON value for " + where + ": " + j.dump());
}

}  // namespace

std::string trace_to_json(const TimedTrace& tr, int indent) {
  nlohmann::ordered_json j;
  j["vars"] = tr.vars();
  auto steps = nlohmann::ordered_json::array();
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    nlohmann::ordered_json s;
    s["t"] = rational_to_fraction(tr.time(i));
    for (const auto& v : tr.vars()) s[v] = value_json(tr.at(i, v));
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j.dump(indent);
}

TimedTrace trace_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed trace JSON: ") + e.what());
  }
  if (!j.contains("vars") || !j.contains("steps")) throw Error("trace JSON needs \"vars\" and \"steps\"");
  std::vector<std::string> vars = j["vars"].get<std::vector<std::string>>();
  TimedTrace tr(vars);
  for (const auto& s : j["steps"]) {
    if (!s.contains("t")) throw Error("trace step without \"t\"");
    Value t = value_from_json(s["t"], "t");
    if (!t.is_numeric()) throw Error("time value must be numeric");
    std::map<std::string, Value> state;
    for (const auto& v : vars) {
      if (!s.contains(v)) throw Error("trace step is missing '" + v + "'");
      state[v] = value_from_json(s[v], v);
    }
    tr.push(t.as_rational(), state);
  }
  return tr;
}

TimedTrace coerce_to_program(const TimedTrace& tr, const SpecProgram& p) {
  TimedTrace out = tr;
  for (std::size_t i = 1; i <= out.length(); ++i) {
    auto& r = out.mutable_row(i);
    for (const auto& name : out.vars()) {
      const VarDecl* d = p.find(name);
      auto& v = r[*out.slot(name)];
      if (d && d->type == TypeTag::Real && v.kind() == Value::Kind::Int) v = Value::real(v.as_rational());
    }
  }
  return out;
}

}  // namespace rtc
