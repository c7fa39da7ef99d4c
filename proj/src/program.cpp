#include "rtc/program.hpp"

#include <algorithm>
#include <sstream>

namespace rtc {

const VarDecl* SpecProgram::find(std::string_view name) const {
  for (const auto& v : vars)
    if (v.name == name) return &v;
  return nullptr;
}

bool SpecProgram::is_timeout(std::string_view name) const {
  return std::find(timeouts.begin(), timeouts.end(), name) != timeouts.end();
}

std::map<std::string, TypeTag> SpecProgram::type_env() const {
  std::map<std::string, TypeTag> env;
  for (const auto& v : vars) env[v.name] = v.type;
  env[std::string(kTimeVar)] = TypeTag::Real;
  return env;
}

std::string SpecProgram::fresh_name(const std::string& base) const {
  auto taken = [&](const std::string& n) { return n == kTimeVar || find(n) != nullptr; };
  if (!taken(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (!taken(n)) return n;
  }
}

void SpecProgram::add_var(std::string name, TypeTag type) {
  if (name == kTimeVar || find(name)) throw Error("duplicate variable declaration '" + name + "'");
  vars.push_back({std::move(name), type, {}});
}

void check_names(const SpecProgram& p) {
  auto env = p.type_env();
  auto check = [&](const NamedExpr& ne) {
    for (const auto& n : referenced_vars(ne.expr))
      if (!env.count(n)) throw Error("unknown identifier '" + n + "' in '" + ne.name + "'");
  };
  for (const auto& c : p.transition) check(c);
  for (const auto& c : p.properties) check(c);
  for (const auto& c : p.lemmas) check(c);
  for (const auto& to : p.timeouts) {
    const VarDecl* d = p.find(to);
    if (!d) throw Error("unknown timeout variable '" + to + "'");
    if (d->type != TypeTag::Real) throw TypeError("timeout variable '" + to + "' must be real");
  }
}

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string to_source(const SpecProgram& p) {
  std::ostringstream os;
  for (const auto& v : p.vars) os << "var " << v.name << " : " << to_string(v.type) << ";\n";
  if (!p.timeouts.empty()) {
    os << "timeout ";
    for (std::size_t i = 0; i < p.timeouts.size(); ++i) os << (i ? ", " : "") << p.timeouts[i];
    os << ";\n";
  }
  for (const auto& c : p.transition) os << "assert " << quote(c.name) << " : " << to_source(c.expr) << ";\n";
  for (const auto& c : p.lemmas) os << "lemma " << quote(c.name) << " : " << to_source(c.expr) << ";\n";
  for (const auto& c : p.properties) os << "property " << quote(c.name) << " : " << to_source(c.expr) << ";\n";
  return os.str();
}

namespace {

bool same(const std::vector<NamedExpr>& a, const std::vector<NamedExpr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].expr != b[i].expr) return false;
  return true;
}

}  // namespace

bool operator==(const SpecProgram& a, const SpecProgram& b) {
  if (a.vars.size() != b.vars.size()) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i].name != b.vars[i].name || a.vars[i].type != b.vars[i].type) return false;
  return a.timeouts == b.timeouts && same(a.transition, b.transition) && same(a.properties, b.properties) &&
         same(a.lemmas, b.lemmas);
}

}  // namespace rtc
