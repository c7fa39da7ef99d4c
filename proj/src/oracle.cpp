#include "rtc/oracle.hpp"

#include <chrono>
#include <set>

#include "rtc/lowering.hpp"
#include "rtc/membership.hpp"
#include "rtc/source.hpp"

namespace rtc {

void SuiteReport::note(std::string d) {
  ++discrepancies;
  if (details.size() < 5) details.push_back(std::move(d));
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SpecProgram host_program(const std::string& text) { return parse_source(text).program.program; }

WheneverEventEvent response(const Interval& window) { return {var("c"), var("e"), window, false}; }

// Key of the first `width` slots (t plus the host variables) of every step.
std::string host_key(const TimedTrace& tr, std::size_t width) {
  std::string k;
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    for (std::size_t s = 0; s < width; ++s) {
      k += tr.at_slot(i, s).to_string();
      k += ',';
    }
    k += ';';
  }
  return k;
}

std::string literal(const Rational& q) { return to_source(lit_real(q)); }

}  // namespace

std::vector<std::string> observer_hosts() {
  return {
      "var c, e : bool;",
      "var c, e : bool; e = (false -> pre(c));",
      "var c, e : bool; c = (true -> false);",
      "var c, e : bool; e = (not c);",
      "var c, e : bool; assert e => not c;",
  };
}

std::vector<std::string> prop_hosts(const Interval& window) {
  std::string far = window.high_closed ? " > " : " >= ";
  std::vector<std::string> hosts = {
      "var c, e : bool; c = (true -> false);",
      "var c, e, seen : bool; seen = (c or (false -> pre(seen))); assert c => (true -> not pre(seen));",
      "var c, e, hc : bool; var lc : real; lc = ite(c, t, (0.0 -> pre(lc))); hc = (c or (false -> pre(hc)));"
      " assert c => (true -> (not pre(hc) or t - pre(lc)" + far + literal(window.high) + "));",
  };
  // Free c and e restricted by the side-condition monitor itself.
  SpecProgram p = host_program("var c, e : bool;");
  ObserverBundle side = compile_prop_side_condition(response(window), p, "m.");
  apply_bundle(p, side, "side");
  p.transition.push_back({"prop", *side.property});
  hosts.push_back(to_source(p));
  return hosts;
}

SuiteReport observer_equivalence_suite(const std::vector<std::string>& hosts, const Interval& window,
                                       const EnumerationDomain& dom) {
  auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "observer-equivalence";
  WheneverEventEvent pat = response(window);
  for (const auto& text : hosts) {
    SpecProgram host = host_program(text);
    std::size_t width = host.vars.size() + 1;
    SpecProgram watched = host;
    ObserverBundle obs = compile_property_observer(pat, host, "obs.");
    apply_bundle(watched, obs, "observer");

    // Host projections of observer runs whose pass fails at their last step.
    std::set<std::string> failing;
    TraceEnumerator ext(watched, dom);
    ext.run([&](const TimedTrace& tr) {
      if (!eval_bool(*obs.property, tr, tr.length())) failing.insert(host_key(tr, width));
      return true;
    });

    std::vector<bool> bad(dom.horizon + 1, false);
    TraceEnumerator base(host, dom);
    base.run([&](const TimedTrace& tr) {
      std::size_t n = tr.length();
      bad[n] = (n > 1 && bad[n - 1]) || failing.count(host_key(tr, width)) > 0;
      bool out = membership_patt(pat, tr).verdict == Membership::Out;
      ++rep.traces;
      if (bad[n] != out)
        rep.note("host '" + text + "': observer " + (bad[n] ? "fails" : "holds") + " but L_patt says " +
                 (out ? "out" : "in") + " on " + trace_to_json(tr));
      return true;
    });
    ++rep.cases;
  }
  rep.seconds = since(t0);
  return rep;
}

SuiteReport constraint_equivalence_suite(const std::vector<std::string>& hosts, const Interval& window,
                                         const EnumerationDomain& dom) {
  auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "constraint-equivalence";
  WheneverEventEvent pat = response(window);
  for (const auto& text : hosts) {
    SpecProgram host = host_program(text);
    std::size_t width = host.vars.size() + 1;
    SpecProgram constrained = host;
    apply_bundle(constrained, compile_constraint(Pattern(pat), host, "cons."), "cons");

    std::set<std::string> admitted;
    TraceEnumerator ext(constrained, dom);
    ext.run([&](const TimedTrace& tr) {
      admitted.insert(host_key(tr, width));
      return true;
    });

    TraceEnumerator base(host, dom);
    base.run([&](const TimedTrace& tr) {
      ++rep.traces;
      if (!membership_prop(pat, tr).in()) {
        rep.note("host '" + text + "' leaves L_prop on " + trace_to_json(tr));
        return true;
      }
      bool in_patt = membership_patt(pat, tr).in();
      bool in_cons = admitted.count(host_key(tr, width)) > 0;
      if (in_patt != in_cons)
        rep.note("host '" + text + "': L_cons constraint " + (in_cons ? "admits" : "rejects") + " but L_patt says " +
                 (in_patt ? "in" : "out") + " on " + trace_to_json(tr));
      return true;
    });
    ++rep.cases;
  }
  rep.seconds = since(t0);
  return rep;
}

TimedTrace random_ce_trace(std::mt19937_64& rng, std::size_t max_len, long max_delta) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<long> delta(1, max_delta);
  std::bernoulli_distribution coin(0.35);
  TimedTrace tr({"c", "e"});
  Rational now = 0;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) {
    if (i > 0) now += delta(rng);
    bool c = coin(rng);
    bool e = coin(rng);
    tr.push(now, {{"c", Value::boolean(c)}, {"e", Value::boolean(e)}});
  }
  return tr;
}

SuiteReport inclusion_suite(std::uint64_t seed, std::size_t count, const Interval& window) {
  auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "patt-within-cons";
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  WheneverEventEvent pat = response(window);
  for (std::size_t k = 0; k < count; ++k) {
    TimedTrace tr = random_ce_trace(rng, 10, 15);
    ++rep.cases;
    ++rep.traces;
    if (membership_patt(pat, tr).in() && !membership_cons(pat, tr).in())
      rep.note("in L_patt but not L_cons: " + trace_to_json(tr));
  }
  rep.seconds = since(t0);
  return rep;
}

}  // namespace rtc

namespace rtc {

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

AgreementCase random_agreement_case(std::mt19937_64& rng) {
  AgreementCase c;
  std::string s = "var a, b : bool; x : int;";
  bool with_y = coin(rng, 0.3);
  bool with_r = !with_y && coin(rng, 0.3);
  bool timed = coin(rng, 0.35);
  if (with_y) s += " y : int;";
  if (with_r) s += " r : real;";
  if (timed) {
    std::string per = pick(rng, std::vector<std::string>{"5.0", "10.0"});
    s += " to : real; timeout to; to = (" + per + " -> ite(pre(t) = pre(to), pre(to) + " + per + ", pre(to)));";
    if (coin(rng)) {
      s += " so : real; timeout so;"
           " so = (inf -> ite(pre(a), pre(t) + 3.0, ite(pre(t) = pre(so), inf, pre(so))));";
    }
  }
  std::string init = pick(rng, std::vector<std::string>{"0", "1", "-1"});
  std::vector<std::string> defs = {
      "x = (" + init + " -> ite(a, pre(x) + 1, pre(x)));",
      "x = (" + init + " -> ite(a, pre(x) + 1, 0));",
      "x = (" + init + " -> pre(x) + ite(a and not b, 1, -1));",
      "x = ite(a, 1, 0) + ite(b, 1, 0);",
  };
  if (with_y) defs.push_back("x = (0 -> pre(x) + y);");
  if (timed) defs.push_back("x = (0 -> ite(t = to, pre(x) + 1, pre(x)));");
  s += " " + pick(rng, defs);
  std::vector<std::string> cons = {"", "", "assert not (a and b);", "assert true -> (pre(a) => not a);",
                                   "assert x <= 3;", "assert b => (x >= 0);"};
  if (with_y) cons.push_back("assert y <> 1 or a;");
  if (with_r) cons.push_back("assert r > 0.0 => b;");
  s += " " + pick(rng, cons);
  std::vector<std::string> likely = {
      "x >= -2", "hist(x >= -2) or a", "x <= 7", "true -> (x - pre(x) <= 1 or not a)", "initz(x <= 1)",
      "a and b => x <> -5",
  };
  if (timed) likely.push_back("t >= 0.0 and to > 0.0");
  std::vector<std::string> props = {
      "x < 2", "x < 3", "x <= 1", "a => x >= 0", "hist(x >= 0)", "initz(a) or x <> 2", "x >= -1",
      "not (a and b) or x > 0", "true -> (pre(x) <= x)", "(0 -> pre(x)) < 3",
  };
  if (with_y) props.push_back("y + x < 4");
  if (with_r) props.push_back("r < frac(1, 2) or not a");
  if (timed) {
    props.push_back("t < 20.0");
    props.push_back("true -> (t - pre(t) < 5.0)");
    props.push_back("x < 2 or t >= 10.0");
  } else {
    props.push_back("t <= 3.0 or x > 0");
  }
  s += " property \"p\" : " + pick(rng, coin(rng, 0.4) ? likely : props) + ";";
  c.source = s;
  c.domain.int_grid = {Rational(-1), Rational(0), Rational(1), Rational(2)};
  c.domain.real_grid = {Rational(0), Rational(1, 2)};
  c.domain.time_deltas = timed ? std::vector<Rational>{Rational(1)} : std::vector<Rational>{Rational(1), Rational(2)};
  if (with_y || with_r) c.domain.int_grid = {Rational(0), Rational(1), Rational(2)};
  c.domain.horizon = std::uniform_int_distribution<std::size_t>(2, with_y ? 3 : 5)(rng);
  return c;
}

SuiteReport engine_agreement_suite(std::uint64_t seed, std::size_t count, const SolverConfig& solver,
                                   unsigned threads) {
  auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "engine agreement";
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::vector<AgreementCase> cases;
  for (std::size_t i = 0; i < count; ++i) cases.push_back(random_agreement_case(rng));

  std::vector<std::vector<std::string>> found(cases.size());
  std::vector<std::size_t> decoded(cases.size(), 0);
  parallel_for(cases.size(), threads, [&](std::size_t i) {
    const auto& c = cases[i];
    auto fail = [&](const std::string& what) { found[i].push_back(what + " on: " + c.source); };
    try {
      ElaboratedProgram ep = load_program_text(c.source);
      const SpecProgram& p = ep.program;
      const Expr& prop = p.properties.at(0).expr;
      CheckResult ex = check_invariant_explicit(p, prop, c.domain);
      EngineConfig cfg;
      cfg.solver = solver;
      cfg.domain = c.domain;
      cfg.restrict_domain = true;
      cfg.k = c.domain.horizon;
      cfg.kind = EngineKind::Bmc;
      CheckResult bmc = run_engine(p, prop, cfg);
      cfg.kind = EngineKind::KInduction;
      CheckResult kind = run_engine(p, prop, cfg);
      for (const CheckResult* r : {&bmc, &kind})
        if (r->counterexample) ++decoded[i];
      if (bmc.verdict != ex.verdict)
        fail("bmc " + std::string(to_string(bmc.verdict)) + " vs explicit " + std::string(to_string(ex.verdict)));
      else if (ex.fail_step != bmc.fail_step)
        fail("bmc fails at " + std::to_string(bmc.fail_step.value_or(0)) + " vs explicit at " +
             std::to_string(ex.fail_step.value_or(0)));
      if (kind.verdict == Verdict::Proved && ex.verdict == Verdict::Falsified) fail("k-induction proved a falsified property");
      if (kind.verdict == Verdict::Falsified && kind.fail_step != ex.fail_step)
        fail("k-induction fails at " + std::to_string(kind.fail_step.value_or(0)) + " vs explicit at " +
             std::to_string(ex.fail_step.value_or(0)));
      if (kind.verdict == Verdict::Unknown && bmc.verdict == Verdict::Falsified) fail("k-induction missed a counterexample");
    } catch (const std::exception& e) {
      fail(std::string("error: ") + e.what());
    }
  });

  std::size_t total_decoded = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ++rep.cases;
    total_decoded += decoded[i];
    for (auto& d : found[i]) rep.note(std::move(d));
  }
  rep.traces = total_decoded;
  rep.seconds = since(t0);
  return rep;
}

}  // namespace rtc
