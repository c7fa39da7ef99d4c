#include "rtc/compose.hpp"

#include <algorithm>
#include <set>

#include "rtc/lowering.hpp"
#include "rtc/typecheck.hpp"

namespace rtc {

std::string_view to_string(ObligationKind k) {
  switch (k) {
    case ObligationKind::AssumptionDischarge: return "assumption-discharge";
    case ObligationKind::GuaranteeCheck: return "guarantee-check";
    case ObligationKind::TopInvariant: return "top-invariant";
    case ObligationKind::LeafContract: return "leaf-contract";
  }
  return "?";
}

namespace {

Expr prefixed(const Expr& e, const std::string& pfx) {
  if (pfx.empty()) return e;
  return rename_vars(e, [&](const std::string& n) { return n == kTimeVar ? n : pfx + n; });
}

Pattern prefixed(const Pattern& p, const std::string& pfx) {
  return std::visit(
      [&](auto q) -> Pattern {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent>) {
          q.cause = prefixed(q.cause, pfx);
          q.effect = prefixed(q.effect, pfx);
        } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
          q.cause = prefixed(q.cause, pfx);
          q.condition = prefixed(q.condition, pfx);
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          q.condition = prefixed(q.condition, pfx);
          q.effect = prefixed(q.effect, pfx);
        } else if constexpr (std::is_same_v<T, Always>) {
          q.condition = prefixed(q.condition, pfx);
        } else {
          q.event = prefixed(q.event, pfx);
        }
        return q;
      },
      p);
}

std::set<std::string> clause_vars(const Clause& c) {
  if (const auto* e = std::get_if<Expr>(&c.body)) return referenced_vars(*e);
  return pattern_vars(std::get<Pattern>(c.body));
}

class Assembly {
 public:
  Assembly() = default;
  explicit Assembly(SpecProgram p) : prog(std::move(p)) {}

  SpecProgram prog;

  void declare(const std::string& n, TypeTag t) {
    if (n == kTimeVar || prog.find(n)) throw Error("name collision: '" + n + "' is declared twice in the composition");
    prog.add_var(n, t);
  }

  void add_interface(const ComponentDef& c, const std::string& pfx) {
    for (const auto& port : c.ports) declare(pfx + port.name, port.type);
    for (const auto& l : c.locals) declare(pfx + l.name, l.type);
    for (const auto& e : c.eqs) prog.transition.push_back({pfx + e.name, prefixed(e.expr, pfx)});
  }

  void connect(const Connection& c, const std::string& pfx, const std::string& owner) {
    std::string from = pfx + c.from, to = pfx + c.to;
    const VarDecl* a = prog.find(from);
    const VarDecl* b = prog.find(to);
    if (!a || !b)
      throw Error("connection '" + c.from + " -> " + c.to + "' in '" + owner + "' names unknown port '" +
                  (a ? c.to : c.from) + "'");
    if (a->type != b->type)
      throw TypeError("connection '" + c.from + " -> " + c.to + "' in '" + owner + "' joins " +
                      std::string(to_string(a->type)) + " to " + std::string(to_string(b->type)));
    prog.transition.push_back({"connect " + from + " -> " + to, eq(var(to), var(from))});
  }

  // Sound under-approximation of a clause holding so far: pattern clauses use
  // their trace constraint monitor.
  Expr hypothesis(const Clause& c, const std::string& pfx) {
    std::string key = pfx + c.name;
    if (auto it = hyp_cache_.find(key); it != hyp_cache_.end()) return it->second;
    Expr out;
    if (const auto* e = std::get_if<Expr>(&c.body)) {
      out = prefixed(*e, pfx);
    } else {
      ObserverBundle b = compile_constraint(prefixed(std::get<Pattern>(c.body), pfx), prog, monitor_prefix(c, pfx));
      add_monitor(b);
      out = *b.restriction;
    }
    hyp_cache_.emplace(key, out);
    return out;
  }

  Expr conclusion(const Clause& c, const std::string& pfx) {
    if (const auto* e = std::get_if<Expr>(&c.body)) return prefixed(*e, pfx);
    ObserverBundle b = compile_property_observer(prefixed(std::get<Pattern>(c.body), pfx), prog, monitor_prefix(c, pfx));
    add_monitor(b);
    return *b.property;
  }

  std::optional<Expr> hypotheses(const std::vector<Clause>& cs, const std::string& pfx) {
    if (cs.empty()) return std::nullopt;
    std::vector<Expr> parts;
    for (const auto& c : cs) parts.push_back(hypothesis(c, pfx));
    return conjunction(parts);
  }

  Expr conclusions(const std::vector<Clause>& cs, const std::string& pfx) {
    std::vector<Expr> parts;
    for (const auto& c : cs) parts.push_back(conclusion(c, pfx));
    return parts.empty() ? lit(true) : conjunction(parts);
  }

 private:
  static std::string monitor_prefix(const Clause& c, const std::string& pfx) {
    return pfx + sanitize_name(c.name) + ".";
  }

  void add_monitor(const ObserverBundle& b) {
    for (const auto& v : b.fresh_vars) declare(v.name, v.type);
    for (const auto& c : b.constraints) prog.transition.push_back(c);
    for (const auto& t : b.timeouts) prog.timeouts.push_back(t);
  }

  std::map<std::string, Expr> hyp_cache_;
};

const ComponentDef& lookup(const SystemModel& m, const std::string& type, const std::string& user) {
  const ComponentDef* d = m.find(type);
  if (!d) throw Error("unknown component type '" + type + "' used by '" + user + "'");
  return *d;
}

Expr implication(const std::vector<Expr>& hyps, Expr concl) {
  if (hyps.empty()) return concl;
  return implies(conjunction(hyps), std::move(concl));
}

// Keeps the lemmas that only mention variables of `p`, then type-checks.
Obligation finish(Obligation ob) {
  auto env = ob.program.type_env();
  std::erase_if(ob.program.lemmas, [&](const NamedExpr& l) {
    auto vs = referenced_vars(l.expr);
    return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) { return !env.count(v); });
  });
  type_check(ob.program);
  if (type_of(ob.property, env) != TypeTag::Bool) throw TypeError("obligation '" + ob.name + "' is not boolean");
  return ob;
}

Assembly contracts_only(const SystemModel& m, const ComponentDef& sys) {
  Assembly a;
  a.add_interface(sys, "");
  for (const auto& s : sys.subs) a.add_interface(lookup(m, s.type, sys.name), s.name + ".");
  for (const auto& c : sys.connections) a.connect(c, "", sys.name);
  return a;
}

ElaboratedProgram leaf_program(const ComponentDef& c) {
  if (!c.body) throw Error("component '" + c.name + "' has no implementation");
  ProgramSource ps = *c.body;
  SpecProgram base;
  for (const auto& port : c.ports) base.add_var(port.name, port.type);
  for (const auto& l : c.locals) base.add_var(l.name, l.type);
  base.transition = c.eqs;
  for (const auto& v : ps.program.vars) base.add_var(v.name, v.type);
  base.transition.insert(base.transition.end(), ps.program.transition.begin(), ps.program.transition.end());
  base.properties = ps.program.properties;
  base.lemmas = ps.program.lemmas;
  base.timeouts = ps.program.timeouts;
  ps.program = std::move(base);
  return elaborate(ps);
}

void flatten(const SystemModel& m, const ComponentDef& c, const std::string& pfx, Assembly& a,
             std::vector<std::string>& stack) {
  if (std::find(stack.begin(), stack.end(), c.name) != stack.end())
    throw Error("component '" + c.name + "' contains itself");
  stack.push_back(c.name);
  if (!c.subs.empty()) {
    if (c.body) throw Error("component '" + c.name + "' has both an implementation and subcomponents");
    a.add_interface(c, pfx);
    for (const auto& s : c.subs) flatten(m, lookup(m, s.type, c.name), pfx + s.name + ".", a, stack);
    for (const auto& conn : c.connections) a.connect(conn, pfx, c.name);
  } else {
    SpecProgram body = leaf_program(c).program;
    for (const auto& v : body.vars) a.declare(pfx + v.name, v.type);
    for (const auto& t : body.transition) a.prog.transition.push_back({pfx + t.name, prefixed(t.expr, pfx)});
    for (const auto& l : body.lemmas) a.prog.lemmas.push_back({pfx + l.name, prefixed(l.expr, pfx)});
    for (const auto& t : body.timeouts) a.prog.timeouts.push_back(pfx + t);
  }
  stack.pop_back();
}

}  // namespace

std::vector<std::string> order_components(const ComponentDef& sys, const std::vector<std::string>& permutation) {
  std::vector<std::string> names;
  for (const auto& s : sys.subs) names.push_back(s.name);
  if (permutation.empty()) return names;
  std::vector<std::string> a = names, b = permutation;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    std::string want;
    for (const auto& n : names) want += (want.empty() ? "" : ", ") + n;
    throw Error("order for '" + sys.name + "' must list each subcomponent exactly once: " + want);
  }
  return permutation;
}

std::vector<Obligation> gen_assumption_obligations(const SystemModel& m, const ComponentDef& sys,
                                                   const ComposeOptions& opts) {
  std::vector<Obligation> out;
  if (sys.subs.empty()) return out;
  auto it = opts.order.find(sys.name);
  std::vector<std::string> order = order_components(sys, it == opts.order.end() ? std::vector<std::string>{} : it->second);
  std::map<std::string, const ComponentDef*> type_of_inst;
  for (const auto& s : sys.subs) type_of_inst[s.name] = &lookup(m, s.type, sys.name);

  std::set<std::string> driven;
  for (const auto& c : sys.connections) driven.insert(c.to);
  for (const auto& inst : order) {
    const ComponentDef& c = *type_of_inst[inst];
    for (const auto& a : c.assumptions)
      for (const auto& v : clause_vars(a)) {
        bool input = std::any_of(c.ports.begin(), c.ports.end(),
                                 [&](const Port& p) { return p.name == v && p.dir == PortDir::Input; });
        if (input && !driven.count(inst + "." + v))
          throw Error("assumption '" + a.name + "' of '" + inst + "' reads unconnected input '" + inst + "." + v + "'");
      }
  }

  int formula = opts.rule == AssumptionRule::Strong ? 2 : opts.rule == AssumptionRule::Weak ? 3 : 4;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::string& inst = order[pos];
    const ComponentDef& c = *type_of_inst[inst];
    for (const auto& a : c.assumptions) {
      Assembly as = contracts_only(m, sys);
      std::vector<Expr> hyps;
      if (auto h = as.hypotheses(sys.assumptions, "")) hyps.push_back(hist(*h));
      if (opts.rule != AssumptionRule::Strong) {
        for (const auto& w : order)
          if (auto g = as.hypotheses(type_of_inst[w]->guarantees, w + ".")) hyps.push_back(initz(hist(*g)));
        for (std::size_t q = 0; q < order.size(); ++q) {
          bool usable = opts.rule == AssumptionRule::Weak ? q != pos : q < pos;
          if (!usable) continue;
          if (auto g = as.hypotheses(type_of_inst[order[q]]->guarantees, order[q] + "."))
            hyps.push_back(hist(*g));
        }
      }
      Expr concl = as.conclusion(a, inst + ".");
      Obligation ob;
      ob.name = sys.name + ": assumption " + inst + "." + a.name;
      ob.kind = ObligationKind::AssumptionDischarge;
      ob.formula = formula;
      ob.component = sys.name;
      ob.property = implication(hyps, concl);
      ob.program = std::move(as.prog);
      out.push_back(finish(std::move(ob)));
    }
  }
  return out;
}

Obligation gen_guarantee_obligation(const SystemModel& m, const ComponentDef& sys) {
  Assembly as = contracts_only(m, sys);
  std::vector<Expr> hyps;
  if (auto h = as.hypotheses(sys.assumptions, "")) hyps.push_back(hist(*h));
  for (const auto& s : sys.subs)
    if (auto g = as.hypotheses(lookup(m, s.type, sys.name).guarantees, s.name + ".")) hyps.push_back(hist(*g));
  Expr concl = as.conclusions(sys.guarantees, "");
  Obligation ob;
  ob.name = sys.name + ": guarantees";
  ob.kind = ObligationKind::GuaranteeCheck;
  ob.formula = sys.subs.empty() ? 1 : 5;
  ob.component = sys.name;
  ob.property = implication(hyps, concl);
  ob.program = std::move(as.prog);
  return finish(std::move(ob));
}

std::vector<Obligation> gen_leaf_obligations(const ComponentDef& c) {
  ElaboratedProgram ep = leaf_program(c);
  std::vector<NamedExpr> own = ep.program.properties;
  ep.program.properties.clear();
  std::vector<Obligation> out;
  Assembly as(ep.program);
  std::vector<Expr> hyps;
  if (auto h = as.hypotheses(c.assumptions, "")) hyps.push_back(hist(*h));
  Obligation ob;
  ob.name = c.name + ": contract";
  ob.kind = ObligationKind::LeafContract;
  ob.formula = 1;
  ob.component = c.name;
  ob.property = implication(hyps, as.conclusions(c.guarantees, ""));
  ob.program = as.prog;
  out.push_back(finish(std::move(ob)));
  for (const auto& p : own) {
    Obligation po;
    po.name = c.name + ": property " + p.name;
    po.kind = ObligationKind::LeafContract;
    po.formula = 1;
    po.component = c.name;
    po.program = as.prog;
    po.property = implication(hyps, p.expr);
    out.push_back(finish(std::move(po)));
  }
  return out;
}

std::vector<Obligation> generate_obligations(const SystemModel& m, const ComposeOptions& opts) {
  if (m.top.empty()) throw Error("no system declared");
  std::vector<Obligation> out;
  std::set<std::string> done;
  std::vector<std::string> stack;
  auto visit = [&](auto& self, const ComponentDef& c) -> void {
    if (std::find(stack.begin(), stack.end(), c.name) != stack.end())
      throw Error("component '" + c.name + "' contains itself");
    if (!done.insert(c.name).second) return;
    stack.push_back(c.name);
    if (!c.subs.empty()) {
      if (c.body) throw Error("component '" + c.name + "' has both an implementation and subcomponents");
      for (auto& ob : gen_assumption_obligations(m, c, opts)) out.push_back(std::move(ob));
      out.push_back(gen_guarantee_obligation(m, c));
      for (const auto& s : c.subs) self(self, lookup(m, s.type, c.name));
    } else if (c.body) {
      for (auto& ob : gen_leaf_obligations(c)) out.push_back(std::move(ob));
    } else {
      out.push_back(gen_guarantee_obligation(m, c));
    }
    stack.pop_back();
  };
  visit(visit, lookup(m, m.top, "the model"));
  return out;
}

SpecProgram compose_monolithic(const SystemModel& m) {
  if (m.top.empty()) throw Error("no system declared");
  const ComponentDef& top = lookup(m, m.top, "the model");
  Assembly a;
  std::vector<std::string> stack;
  flatten(m, top, "", a, stack);
  if (!top.guarantees.empty()) {
    std::vector<Expr> hyps;
    if (auto h = a.hypotheses(top.assumptions, "")) hyps.push_back(hist(*h));
    Expr concl = a.conclusions(top.guarantees, "");
    a.prog.properties.push_back({top.name + " contract", implication(hyps, concl)});
  }
  type_check(a.prog);
  return a.prog;
}

}  // namespace rtc
