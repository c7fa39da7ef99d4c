// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "rtc/compose.hpp"
#include "rtc/engine.hpp"
#include "rtc/lowering.hpp"
#include "rtc/oracle.hpp"
#include "rtc/source.hpp"

using namespace rtc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const Interval kWindow{Rational(10), Rational(20)};

std::string fixture(const std::string& name) { return read_file(std::string(RTC_TEST_DATA) + "/fixtures/" + name); }

SystemModel system_fixture(const std::string& name) { return *parse_source(fixture(name)).system; }

EngineConfig smt(EngineKind kind, std::size_t k) {
  EngineConfig c;
  c.kind = kind;
  c.k = k;
  c.solver.path = default_solver_path();
  if (c.solver.path.empty()) throw SolverError("no SMT solver on PATH (set RTC_SOLVER)");
  return c;
}

std::string suite_detail(const SuiteReport& r) {
  std::ostringstream os;
  os << r.cases << " cases, " << r.traces << " traces, " << r.discrepancies << " discrepancies";
  if (!r.details.empty()) os << "; first: " << r.details.front();
  return os.str();
}

Outcome suite_outcome(const SuiteReport& r, double budget) {
  return {r.ok() && r.seconds < budget, suite_detail(r)};
}

EnumerationDomain thread_domain() {
  EnumerationDomain d;
  d.time_deltas = {Rational(5), Rational(10)};
  d.horizon = 5;
  return d;
}

const Obligation& named(const std::vector<Obligation>& obs, const std::string& n) {
  for (const auto& o : obs)
    if (o.name == n) return o;
  throw Error("missing obligation '" + n + "'");
}

Outcome observer_equivalence() {
  return suite_outcome(observer_equivalence_suite(observer_hosts(), kWindow, thread_domain()), 60);
}

Outcome constraint_equivalence() {
  return suite_outcome(constraint_equivalence_suite(prop_hosts(kWindow), kWindow, thread_domain()), 60);
}

Outcome inclusion() { return suite_outcome(inclusion_suite(20261016, 10000, kWindow), 30); }

Outcome bus_thread() {
  ElaboratedProgram ep = load_program_text(fixture("bus_thread.rtc"));
  const SpecProgram& p = ep.program;
  std::ostringstream os;
  bool ok = true;
  bool side = false;
  for (std::size_t i = 0; i < p.properties.size(); ++i) {
    const auto& prop = p.properties[i];
    CheckResult kind = run_engine(p, prop.expr, smt(EngineKind::KInduction, 8));
    CheckResult bmc = run_engine(p, prop.expr, smt(EngineKind::Bmc, 10));
    ok = ok && kind.verdict == Verdict::Proved && kind.bound <= 8 && bmc.verdict == Verdict::Proved;
    side = side || ep.kinds[i] == PropertyKind::SideCondition;
    os << "'" << prop.name << "' kind " << to_string(kind.verdict) << " at k=" << kind.bound << ", bmc(10) "
       << to_string(bmc.verdict) << (i + 1 < p.properties.size() ? "; " : "");
  }
  return {ok && side && p.properties.size() == 2, os.str()};
}

Outcome compositional() {
  SystemModel m = system_fixture("pipeline.rtc");
  auto obs = generate_obligations(m);
  std::size_t leaves = 0, f4 = 0, f5 = 0, proved = 0;
  for (const auto& o : obs) {
    leaves += o.kind == ObligationKind::LeafContract;
    f4 += o.formula == 4;
    f5 += o.formula == 5;
    proved += run_engine(o.program, o.property, smt(EngineKind::KInduction, 8)).verdict == Verdict::Proved;
  }
  SpecProgram mono = compose_monolithic(m);
  const Expr& prop = mono.properties.at(0).expr;
  EnumerationDomain dom;
  dom.int_grid = {Rational(-1), Rational(0), Rational(1), Rational(3), Rational(6)};
  dom.horizon = 6;
  CheckResult ex = check_invariant_explicit(mono, prop, dom);
  CheckResult bmc = run_engine(mono, prop, smt(EngineKind::Bmc, 10));
  std::ostringstream os;
  os << proved << "/" << obs.size() << " obligations proved (" << leaves << " leaf, " << f4 << " assumption, " << f5
     << " guarantee); monolithic explicit(6) " << to_string(ex.verdict) << " over " << ex.diagnostics << ", bmc(10) "
     << to_string(bmc.verdict);
  bool ok = proved == obs.size() && leaves == 3 && f4 == 3 && f5 == 1 && ex.verdict == Verdict::Proved &&
            bmc.verdict == Verdict::Proved;
  return {ok, os.str()};
}

Outcome cycle() {
  SystemModel m = system_fixture("cyclic.rtc");
  const std::string w = "Loop: assumption w.positive input", v = "Loop: assumption v.positive input";
  ComposeOptions weak;
  weak.rule = AssumptionRule::Weak;
  auto wobs = generate_obligations(m, weak);
  auto check = [](const Obligation& o) { return run_engine(o.program, o.property, smt(EngineKind::KInduction, 8)); };
  bool weak_ok = check(named(wobs, w)).verdict == Verdict::Proved && check(named(wobs, v)).verdict == Verdict::Proved;
  auto obs = generate_obligations(m);
  std::string first = order_components(*m.find("Loop")).front();
  CheckResult r = check(named(obs, "Loop: assumption " + first + ".positive input"));
  bool ordered_ok = first == "w" && r.verdict == Verdict::Falsified && r.fail_step == 1u;
  std::ostringstream os;
  os << "weak rule: both " << (weak_ok ? "discharged" : "NOT discharged") << "; ordered rule: " << first
     << "'s obligation " << to_string(r.verdict);
  if (r.fail_step) os << " at step " << *r.fail_step;
  return {weak_ok && ordered_ok, os.str()};
}

Outcome avionics() {
  auto obs = generate_obligations(system_fixture("avionics.rtc"));
  const Obligation& c = named(obs, "Vehicle: contract");
  EngineConfig kcfg = smt(EngineKind::KInduction, 8);
  CheckResult lemmas = check_lemmas(c.program, kcfg);
  CheckResult bmc = run_engine(c.program, c.property, smt(EngineKind::Bmc, 8));
  kcfg.lemmas_proved = lemmas.verdict == Verdict::Proved;
  CheckResult kind = kcfg.lemmas_proved ? run_engine(c.program, c.property, kcfg) : CheckResult{};
  std::ostringstream os;
  os << c.program.lemmas.size() << " lemmas " << to_string(lemmas.verdict) << "; bmc(8) " << to_string(bmc.verdict)
     << "; kind " << to_string(kind.verdict) << " at k=" << kind.bound;
  bool ok = c.program.lemmas.size() <= 3 && lemmas.verdict == Verdict::Proved && bmc.verdict == Verdict::Proved &&
            kind.verdict == Verdict::Proved;
  return {ok, os.str()};
}

Outcome agreement() {
  SolverConfig sc = smt(EngineKind::Bmc, 1).solver;
  SuiteReport r = engine_agreement_suite(20261016, 200, sc);
  return {r.ok() && r.cases == 200 && r.traces > 0, suite_detail(r) + " (traces = re-validated counterexamples)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"observer verdicts match pattern membership", observer_equivalence},
      {"constraint traces match pattern traces", constraint_equivalence},
      {"L_patt within L_cons on 10000 random traces", inclusion},
      {"sporadic bus thread", bus_thread},
      {"compositional soundness", compositional},
      {"cycle anomaly", cycle},
      {"avionics-style fixture", avionics},
      {"engine agreement", agreement},
  };
  int failed = 0;
  int n = 0;
  for (const auto& c : criteria) {
    ++n;
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
