#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>

#include "rtc/compose.hpp"
#include "rtc/engine.hpp"
#include "rtc/lowering.hpp"
#include "rtc/oracle.hpp"
#include "rtc/smt.hpp"
#include "rtc/source.hpp"
#include "rtc/typecheck.hpp"

using namespace rtc;
using json = nlohmann::ordered_json;

namespace {

constexpr int kToolError = 3;

struct RunConfig {
  std::string input;
  std::string engine = "kind";
  std::size_t k = 8;
  std::string solver;
  double solver_timeout = 300;
  std::string time_grid = "1";
  std::string int_grid = "0,1,2";
  std::string real_grid = "0,1";
  std::size_t horizon = 4;
  std::uint64_t ceiling = 1'000'000;
  std::vector<std::string> lemmas;
  bool unsafe_weak = false;
  bool strong = false;
  std::vector<std::string> order;
  std::string format = "human";
  std::uint64_t seed = 20261016;
  unsigned threads = 0;
  bool verbose = false;

  std::size_t steps = 0;
  std::string inputs;

  bool monolithic = false;

  std::string pattern;
  std::string mode = "core";
  std::string property;
  bool induction_script = false;

  std::string suite = "all";
  std::size_t count = 0;
  std::string oracle_grid = "5,10";
  std::size_t oracle_horizon = 5;
};

std::vector<Rational> parse_grid(const std::string& text, const char* flag) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(parse_rational(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
  }
  return out;
}

EnumerationDomain domain_of(const RunConfig& rc) {
  EnumerationDomain d;
  d.time_deltas = parse_grid(rc.time_grid, "--time-grid");
  d.int_grid = parse_grid(rc.int_grid, "--int-grid");
  d.real_grid = parse_grid(rc.real_grid, "--real-grid");
  d.horizon = rc.horizon;
  d.ceiling = rc.ceiling;
  d.validate();
  return d;
}

EngineConfig engine_of(const RunConfig& rc) {
  EngineConfig c;
  auto kind = engine_from_string(rc.engine);
  if (!kind) throw CLI::ValidationError("--engine", "expected explicit, bmc or kind");
  c.kind = *kind;
  c.k = rc.k;
  c.solver.path = rc.solver.empty() ? default_solver_path() : rc.solver;
  c.solver.timeout_seconds = rc.solver_timeout;
  c.domain = domain_of(rc);
  return c;
}

ComposeOptions compose_options(const RunConfig& rc) {
  ComposeOptions o;
  if (rc.unsafe_weak && rc.strong) throw CLI::ValidationError("--strong-assumptions", "conflicts with --unsafe-weak-assumptions");
  if (rc.unsafe_weak) o.rule = AssumptionRule::Weak;
  if (rc.strong) o.rule = AssumptionRule::Strong;
  for (const auto& spec : rc.order) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--order", "expected SYSTEM=inst,inst,...");
    std::vector<std::string> names;
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string n; std::getline(ss, n, ',');) names.push_back(n);
    o.order[spec.substr(0, eq)] = names;
  }
  return o;
}

std::string_view rule_name(AssumptionRule r) {
  switch (r) {
    case AssumptionRule::Strong: return "strong";
    case AssumptionRule::Weak: return "weak";
    case AssumptionRule::Ordered: return "ordered";
  }
  return "?";
}

// `name: expr` or a bare expression.
NamedExpr parse_lemma(const std::string& text, std::size_t index) {
  auto colon = text.find(':');
  std::string name = "lemma " + std::to_string(index + 1);
  std::string body = text;
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    body = text.substr(colon + 1);
    name.erase(0, name.find_first_not_of(" \t\""));
    name.erase(name.find_last_not_of(" \t\"") + 1);
  }
  return {name, parse_expr(body)};
}

struct Loaded {
  std::optional<SystemModel> system;
  std::vector<Obligation> obligations;
  ComposeOptions options;
};

Loaded load_obligations(const RunConfig& rc) {
  Loaded out;
  SourceFile sf = parse_source(read_file(rc.input));
  out.options = compose_options(rc);
  if (sf.system) {
    out.system = sf.system;
    out.obligations = generate_obligations(*sf.system, out.options);
  } else {
    ElaboratedProgram ep = elaborate(sf.program);
    type_check(ep.program);
    for (std::size_t i = 0; i < ep.program.properties.size(); ++i) {
      Obligation ob;
      ob.name = ep.program.properties[i].name;
      ob.kind = ObligationKind::TopInvariant;
      ob.formula = 1;
      ob.program = ep.program;
      ob.program.properties.clear();
      ob.property = ep.program.properties[i].expr;
      out.obligations.push_back(std::move(ob));
    }
  }
  for (std::size_t i = 0; i < rc.lemmas.size(); ++i) {
    NamedExpr l = parse_lemma(rc.lemmas[i], i);
    auto vs = referenced_vars(l.expr);
    bool used = false;
    for (auto& ob : out.obligations) {
      auto env = ob.program.type_env();
      if (!std::all_of(vs.begin(), vs.end(), [&](const std::string& v) { return env.count(v) > 0; })) continue;
      if (type_of(l.expr, env) != TypeTag::Bool) throw TypeError("lemma '" + l.name + "' is not boolean");
      ob.program.lemmas.push_back(l);
      used = true;
    }
    if (!used) throw Error("lemma '" + l.name + "' mentions variables that no obligation declares");
  }
  return out;
}

struct Outcome {
  CheckResult result;
  std::optional<CheckResult> lemmas;
};

Outcome discharge(const Obligation& ob, const EngineConfig& cfg) {
  Outcome o;
  if (cfg.kind != EngineKind::KInduction || ob.program.lemmas.empty()) {
    SpecProgram p = ob.program;
    p.lemmas.clear();
    o.result = run_engine(p, ob.property, cfg);
    return o;
  }
  o.lemmas = check_lemmas(ob.program, cfg);
  EngineConfig c = cfg;
  if (o.lemmas->verdict == Verdict::Proved) {
    c.lemmas_proved = true;
    o.result = run_engine(ob.program, ob.property, c);
  } else {
    SpecProgram p = ob.program;
    p.lemmas.clear();
    o.result = run_engine(p, ob.property, c);
    o.result.diagnostics += std::string(o.result.diagnostics.empty() ? "" : "; ") + "lemmas not used";
  }
  return o;
}

int exit_code(const std::vector<Outcome>& outs) {
  bool unknown = false;
  for (const auto& o : outs) {
    if (o.result.verdict == Verdict::Falsified) return 1;
    if (o.result.verdict == Verdict::Unknown) unknown = true;
  }
  return unknown ? 2 : 0;
}

json result_json(const CheckResult& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["engine"] = r.engine;
  j["bound"] = r.bound;
  j["bounded"] = r.bounded;
  j["seconds"] = r.seconds;
  j["diagnostics"] = r.diagnostics;
  if (r.fail_step) j["fail_step"] = *r.fail_step;
  if (r.counterexample) j["counterexample"] = json::parse(trace_to_json(*r.counterexample));
  return j;
}

json order_json(const Loaded& l) {
  json j = json::object();
  if (!l.system) return j;
  for (const auto& c : l.system->components) {
    if (c.subs.empty()) continue;
    auto it = l.options.order.find(c.name);
    j[c.name] = order_components(c, it == l.options.order.end() ? std::vector<std::string>{} : it->second);
  }
  return j;
}

void print_trace(std::ostream& os, const TimedTrace& tr) {
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    os << "    step " << i << ": t = " << Value::real(tr.time(i));
    for (const auto& v : tr.vars()) os << ", " << v << " = " << tr.at(i, v);
    os << "\n";
  }
}

void print_human(std::ostream& os, const Loaded& l, const std::vector<Outcome>& outs, int code) {
  json orders = order_json(l);
  for (const auto& [sys, order] : orders.items()) {
    os << "order " << sys << ":";
    for (const auto& n : order) os << " " << n.get<std::string>();
    os << "\n";
  }
  std::size_t n[3] = {0, 0, 0};
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const Obligation& ob = l.obligations[i];
    const CheckResult& r = outs[i].result;
    ++n[static_cast<int>(r.verdict)];
    os << "[" << to_string(r.verdict) << "] " << ob.name << " (" << to_string(ob.kind) << ", formula " << ob.formula
       << ", " << r.engine;
    if (r.verdict == Verdict::Proved) os << (r.bounded ? ", up to " : ", k = ") << r.bound;
    os << ", " << std::fixed << std::setprecision(2) << r.seconds << "s)\n";
    if (const auto& lr = outs[i].lemmas)
      os << "  lemmas: " << to_string(lr->verdict) << (lr->diagnostics.empty() ? "" : " (" + lr->diagnostics + ")") << "\n";
    if (!r.diagnostics.empty()) os << "  note: " << r.diagnostics << "\n";
    if (r.counterexample) {
      os << "  counterexample, property fails at step " << r.fail_step.value_or(r.counterexample->length()) << ":\n";
      print_trace(os, *r.counterexample);
    }
  }
  os << n[0] << " proved, " << n[1] << " falsified, " << n[2] << " unknown (exit " << code << ")\n";
}

int cmd_check(const RunConfig& rc) {
  EngineConfig cfg = engine_of(rc);
  Loaded l = load_obligations(rc);
  std::vector<Outcome> outs(l.obligations.size());
  parallel_for(outs.size(), rc.threads, [&](std::size_t i) { outs[i] = discharge(l.obligations[i], cfg); });
  int code = exit_code(outs);
  if (rc.format == "json") {
    json j;
    j["command"] = "check";
    j["input"] = rc.input;
    j["engine"] = to_string(cfg.kind);
    j["k"] = cfg.k;
    j["rule"] = rule_name(l.options.rule);
    j["order"] = order_json(l);
    j["obligations"] = json::array();
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const Obligation& ob = l.obligations[i];
      json o;
      o["name"] = ob.name;
      o["kind"] = to_string(ob.kind);
      o["formula"] = ob.formula;
      o["component"] = ob.component;
      o["result"] = result_json(outs[i].result);
      if (outs[i].lemmas) {
        json names = json::array();
        for (const auto& lm : ob.program.lemmas) names.push_back(lm.name);
        o["lemmas"] = {{"names", names}, {"result", result_json(*outs[i].lemmas)}};
      }
      j["obligations"].push_back(o);
    }
    j["exit_code"] = code;
    std::cout << j.dump(2) << "\n";
  } else {
    print_human(std::cout, l, outs, code);
  }
  return code;
}

SpecProgram flat_program(const RunConfig& rc) {
  SourceFile sf = parse_source(read_file(rc.input));
  if (sf.system) return compose_monolithic(*sf.system);
  ElaboratedProgram ep = elaborate(sf.program);
  type_check(ep.program);
  return ep.program;
}

int cmd_simulate(const RunConfig& rc) {
  SpecProgram p = flat_program(rc);
  TimedTrace inputs;
  if (!rc.inputs.empty()) inputs = coerce_to_program(trace_from_json(read_file(rc.inputs)), p);
  if (rc.steps == 0 && inputs.empty()) throw CLI::ValidationError("--steps", "give --steps or an --inputs trace");
  if (inputs.empty() && !p.timed())
    for (std::size_t i = 0; i < rc.steps; ++i) inputs.push(Rational(static_cast<long>(i)), {});
  Simulation s = simulate(p, inputs, rc.steps);
  if (rc.format == "json") {
    json j;
    j["trace"] = json::parse(trace_to_json(s.trace));
    if (s.violation)
      j["violation"] = {{"step", s.violation->step}, {"constraint", s.violation->constraint}, {"detail", s.violation->detail}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << trace_to_json(s.trace, 2) << "\n";
    if (s.violation)
      std::cerr << "rtc: step " << s.violation->step << " violates '" << s.violation->constraint
                << "': " << s.violation->detail << "\n";
  }
  return s.violation ? 1 : 0;
}

std::string obligation_source(const Obligation& ob) {
  SpecProgram p = ob.program;
  p.properties = {{ob.name, ob.property}};
  return "// " + ob.name + " (" + std::string(to_string(ob.kind)) + ", formula " + std::to_string(ob.formula) + ")\n" +
         to_source(p);
}

int cmd_compose(const RunConfig& rc) {
  SourceFile sf = parse_source(read_file(rc.input));
  if (!sf.system) throw Error("'" + rc.input + "' declares no system");
  if (rc.monolithic) {
    std::cout << to_source(compose_monolithic(*sf.system));
    return 0;
  }
  Loaded l = load_obligations(rc);
  if (rc.format == "json") {
    json j;
    j["command"] = "compose";
    j["input"] = rc.input;
    j["rule"] = rule_name(l.options.rule);
    j["order"] = order_json(l);
    j["obligations"] = json::array();
    for (const auto& ob : l.obligations) {
      SpecProgram p = ob.program;
      p.properties = {{ob.name, ob.property}};
      j["obligations"].push_back({{"name", ob.name},
                                  {"kind", to_string(ob.kind)},
                                  {"formula", ob.formula},
                                  {"component", ob.component},
                                  {"source", to_source(p)}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& ob : l.obligations) std::cout << obligation_source(ob) << "\n";
  }
  return 0;
}

int cmd_emit(const RunConfig& rc) {
  if (!rc.pattern.empty()) {
    Pattern pat = parse_pattern(rc.pattern);
    SpecProgram host;
    for (const auto& v : pattern_vars(pat)) host.add_var(v, TypeTag::Bool);
    ObserverBundle b;
    if (rc.mode == "observer") {
      b = compile_property_observer(pat, host);
    } else if (rc.mode == "constraint") {
      b = compile_constraint(pat, host);
    } else if (rc.mode == "side") {
      const auto* w = std::get_if<WheneverEventEvent>(&pat);
      if (!w) throw UnsupportedLowering("side conditions exist only for whenever-occurs-occurs patterns");
      b = compile_prop_side_condition(*w, host);
    } else {
      throw CLI::ValidationError("--mode", "with --pattern use observer, constraint or side");
    }
    std::cout << to_source(b);
    return 0;
  }
  if (rc.input.empty()) throw CLI::ValidationError("emit", "give an input file or --pattern");
  SpecProgram p = flat_program(rc);
  if (rc.mode == "core") {
    std::cout << to_source(p);
    return 0;
  }
  if (rc.mode != "smt") throw CLI::ValidationError("--mode", "with a file use core or smt");
  if (p.properties.empty()) throw Error("'" + rc.input + "' has no property to encode");
  const NamedExpr* prop = &p.properties.front();
  if (!rc.property.empty()) {
    auto it = std::find_if(p.properties.begin(), p.properties.end(), [&](const NamedExpr& n) { return n.name == rc.property; });
    if (it == p.properties.end()) throw Error("no property named '" + rc.property + "'");
    prop = &*it;
  }
  std::cout << emit_smtlib(p, prop->expr, rc.induction_script ? SmtMode::KInduction : SmtMode::Bmc, rc.k);
  return 0;
}

int cmd_oracle(const RunConfig& rc) {
  Interval window{Rational(10), Rational(20)};
  EnumerationDomain dom;
  dom.time_deltas = parse_grid(rc.oracle_grid, "--time-grid");
  dom.horizon = rc.oracle_horizon;
  dom.ceiling = rc.ceiling;
  std::vector<SuiteReport> reps;
  auto want = [&](const char* s) { return rc.suite == "all" || rc.suite == s; };
  bool any = false;
  if (want("observer")) {
    any = true;
    reps.push_back(observer_equivalence_suite(observer_hosts(), window, dom));
  }
  if (want("constraint")) {
    any = true;
    reps.push_back(constraint_equivalence_suite(prop_hosts(window), window, dom));
  }
  if (want("inclusion")) {
    any = true;
    reps.push_back(inclusion_suite(rc.seed, rc.count ? rc.count : 10000, window));
  }
  if (want("agreement")) {
    any = true;
    SolverConfig sc;
    sc.path = rc.solver.empty() ? default_solver_path() : rc.solver;
    sc.timeout_seconds = rc.solver_timeout;
    if (sc.path.empty()) throw SolverError("no SMT solver configured (use --solver or set RTC_SOLVER)");
    reps.push_back(engine_agreement_suite(rc.seed, rc.count ? rc.count : 200, sc, rc.threads));
  }
  if (!any) throw CLI::ValidationError("--suite", "expected observer, constraint, inclusion, agreement or all");
  bool ok = std::all_of(reps.begin(), reps.end(), [](const SuiteReport& r) { return r.ok(); });
  if (rc.format == "json") {
    json j;
    j["command"] = "oracle";
    j["seed"] = rc.seed;
    j["suites"] = json::array();
    for (const auto& r : reps)
      j["suites"].push_back({{"name", r.name},
                             {"seed", r.seed},
                             {"cases", r.cases},
                             {"traces", r.traces},
                             {"discrepancies", r.discrepancies},
                             {"details", r.details},
                             {"seconds", r.seconds}});
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "seed " << rc.seed << "\n";
    for (const auto& r : reps) {
      std::cout << r.name << ": " << r.cases << " cases, " << r.traces << " traces, " << r.discrepancies
                << " discrepancies (" << std::fixed << std::setprecision(1) << r.seconds << "s)\n";
      for (const auto& d : r.details) std::cout << "  " << d << "\n";
    }
  }
  return ok ? 0 : 1;
}

void engine_flags(CLI::App* c, RunConfig& rc) {
  c->add_option("--engine", rc.engine, "explicit, bmc or kind")->capture_default_str();
  c->add_option("-k,--depth", rc.k, "BMC depth or induction bound")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--solver", rc.solver, "SMT-LIB solver executable (default: $RTC_SOLVER or z3)");
  c->add_option("--solver-timeout", rc.solver_timeout, "seconds per solver call")->capture_default_str();
  c->add_option("--time-grid", rc.time_grid, "time deltas for explicit enumeration")->capture_default_str();
  c->add_option("--int-grid", rc.int_grid, "integer values for explicit enumeration")->capture_default_str();
  c->add_option("--real-grid", rc.real_grid, "real values for explicit enumeration")->capture_default_str();
  c->add_option("--horizon", rc.horizon, "explicit enumeration depth")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--ceiling", rc.ceiling, "explicit enumeration limit")->capture_default_str();
  c->add_option("--lemma", rc.lemmas, "auxiliary invariant, 'name: expr' (repeatable)");
  c->add_option("--threads", rc.threads, "parallel obligations (0: one per core)")->capture_default_str();
}

void compose_flags(CLI::App* c, RunConfig& rc) {
  c->add_flag("--unsafe-weak-assumptions", rc.unsafe_weak, "discharge assumptions with every other guarantee");
  c->add_flag("--strong-assumptions", rc.strong, "discharge assumptions with system assumptions only");
  c->add_option("--order", rc.order, "subcomponent order, SYSTEM=inst,inst,... (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time contract checker"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML key/value defaults");
  RunConfig rc;
  app.add_option("--format", rc.format, "human or json")->capture_default_str()->check(CLI::IsMember({"human", "json"}));
  app.add_flag("-v,--verbose", rc.verbose, "log the effective configuration");
  app.add_option("--seed", rc.seed, "seed for randomized suites")->capture_default_str();

  auto* check = app.add_subcommand("check", "generate and discharge every obligation");
  check->add_option("file", rc.input, ".rtc input")->required();
  engine_flags(check, rc);
  compose_flags(check, rc);

  auto* sim = app.add_subcommand("simulate", "step a program and print its timed trace");
  sim->add_option("file", rc.input, ".rtc input")->required();
  sim->add_option("--steps", rc.steps, "number of steps");
  sim->add_option("--inputs", rc.inputs, "trace JSON with values for free variables and time");

  auto* comp = app.add_subcommand("compose", "print the compositional obligations");
  comp->add_option("file", rc.input, ".rtc input")->required();
  comp->add_flag("--monolithic", rc.monolithic, "print the flattened implementation instead");
  compose_flags(comp, rc);

  auto* emit = app.add_subcommand("emit", "print lowered patterns, core programs or SMT-LIB scripts");
  emit->add_option("file", rc.input, ".rtc input");
  emit->add_option("--pattern", rc.pattern, "pattern phrase over boolean signals");
  emit->add_option("--mode", rc.mode, "observer, constraint, side, core or smt")->capture_default_str();
  emit->add_option("--property", rc.property, "property to encode (default: the first)");
  emit->add_option("-k,--depth", rc.k, "unrolling depth")->capture_default_str()->check(CLI::PositiveNumber);
  emit->add_flag("--induction", rc.induction_script, "emit the induction step instead of the base case");

  auto* oracle = app.add_subcommand("oracle", "run the cross-checking suites");
  oracle->add_option("--suite", rc.suite, "observer, constraint, inclusion, agreement or all")->capture_default_str();
  oracle->add_option("--count", rc.count, "random cases (inclusion: 10000, agreement: 200)");
  oracle->add_option("--time-grid", rc.oracle_grid, "time deltas")->capture_default_str();
  oracle->add_option("--horizon", rc.oracle_horizon, "enumeration depth")->capture_default_str();
  oracle->add_option("--solver", rc.solver, "SMT-LIB solver executable");
  oracle->add_option("--threads", rc.threads, "parallel cases (0: one per core)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : std::max(code, kToolError);
  }
  if (rc.verbose) std::cerr << app.config_to_str(true, false);

  try {
    if (check->parsed()) return cmd_check(rc);
    if (sim->parsed()) return cmd_simulate(rc);
    if (comp->parsed()) return cmd_compose(rc);
    if (emit->parsed()) return cmd_emit(rc);
    if (oracle->parsed()) return cmd_oracle(rc);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "rtc: " << e.what() << "\n";
    return kToolError;
  } catch (const std::exception& e) {
    std::cerr << "rtc: " << e.what() << "\n";
    return kToolError;
  }
  return kToolError;
}
