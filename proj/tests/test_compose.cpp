#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <set>

#include "rtc/compose.hpp"
#include "rtc/engine.hpp"
#include "rtc/lowering.hpp"
#include "rtc/membership.hpp"
#include "rtc/source.hpp"

using namespace rtc;

namespace {

#define REQUIRE_SOLVER() \
  if (default_solver_path().empty()) GTEST_SKIP() << "no SMT solver on PATH"

SystemModel model(const std::string& text) {
  SourceFile sf = parse_source(text);
  if (!sf.system) throw Error("test source declares no system");
  return *sf.system;
}

SystemModel fixture(const std::string& name) { return model(read_file(std::string(RTC_TEST_DATA) + "/fixtures/" + name)); }

EngineConfig smt_config(EngineKind kind, std::size_t k) {
  EngineConfig c;
  c.kind = kind;
  c.k = k;
  c.solver.path = default_solver_path();
  return c;
}

const Obligation& find(const std::vector<Obligation>& obs, const std::string& name) {
  for (const auto& o : obs)
    if (o.name == name) return o;
  throw Error("no obligation named '" + name + "'");
}

CheckResult check(const Obligation& o, EngineKind kind = EngineKind::KInduction, std::size_t k = 4) {
  return run_engine(o.program, o.property, smt_config(kind, k));
}

const char* kLeaf = R"(
component Inc {
  input i : int;
  output o : int;
  assume "nonnegative" : i >= 0;
  guarantee "positive" : o >= GUARANTEE;
  implementation { o = i + 1; }
}
system Top {
  input x : int;
  output y : int;
  sub c : Inc;
  connect x -> c.i;
  connect c.o -> y;
}
)";

std::string leaf_with(const std::string& g) {
  std::string s = kLeaf;
  s.replace(s.find("GUARANTEE"), 9, g);
  return s;
}

}  // namespace

TEST(Order, DeclarationOrderByDefault) {
  auto m = fixture("cyclic.rtc");
  EXPECT_EQ(order_components(*m.find("Loop")), (std::vector<std::string>{"w", "v"}));
}

TEST(Order, PermutationIsChecked) {
  auto m = fixture("cyclic.rtc");
  const ComponentDef& loop = *m.find("Loop");
  EXPECT_EQ(order_components(loop, {"v", "w"}), (std::vector<std::string>{"v", "w"}));
  EXPECT_THROW(order_components(loop, {"v"}), Error);
  EXPECT_THROW(order_components(loop, {"v", "v"}), Error);
  EXPECT_THROW(order_components(loop, {"v", "x"}), Error);
}

TEST(Order, LeafHasNoSubcomponents) {
  auto m = fixture("cyclic.rtc");
  EXPECT_TRUE(order_components(*m.find("W")).empty());
  EXPECT_TRUE(gen_assumption_obligations(m, *m.find("W")).empty());
}

TEST(Leaf, ContractProvedUnderAssumption) {
  REQUIRE_SOLVER();
  auto obs = generate_obligations(model(leaf_with("1")));
  const Obligation& c = find(obs, "Inc: contract");
  EXPECT_EQ(c.kind, ObligationKind::LeafContract);
  EXPECT_EQ(c.formula, 1);
  EXPECT_EQ(check(c).verdict, Verdict::Proved);
}

TEST(Leaf, ContractCounterexample) {
  REQUIRE_SOLVER();
  auto obs = generate_obligations(model(leaf_with("2")));
  CheckResult r = check(find(obs, "Inc: contract"));
  ASSERT_EQ(r.verdict, Verdict::Falsified);
  EXPECT_EQ(r.fail_step, 1u);
  EXPECT_EQ(r.counterexample->at(1, "i").as_rational(), Rational(0));
  EXPECT_EQ(r.counterexample->at(1, "o").as_rational(), Rational(1));
}

TEST(Leaf, EmptyContractIsVacuous) {
  REQUIRE_SOLVER();
  auto m = model(R"(
component Free { output o : int; implementation { o = 3; } }
system Top { sub f : Free; }
)");
  auto obs = generate_obligations(m);
  const Obligation& c = find(obs, "Free: contract");
  EXPECT_EQ(to_source(c.property), "true");
  EXPECT_EQ(check(c).verdict, Verdict::Proved);
  EXPECT_EQ(to_source(find(obs, "Top: guarantees").property), "true");
}

TEST(Assumptions, EarlierGuaranteesDischargeLaterAssumptions) {
  REQUIRE_SOLVER();
  auto m = model(R"(
component Src {
  output o : int;
  guarantee "positive" : o > 0;
}
component Dst {
  input i : int;
  assume "positive" : i > 0;
}
system Top {
  sub w : Src;
  sub v : Dst;
  connect w.o -> v.i;
}
)");
  auto obs = gen_assumption_obligations(m, *m.find("Top"));
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].name, "Top: assumption v.positive");
  EXPECT_EQ(obs[0].formula, 4);
  EXPECT_NE(to_source(obs[0].property).find("hist(w.o > 0)"), std::string::npos);
  EXPECT_EQ(check(obs[0]).verdict, Verdict::Proved);

  ComposeOptions strong;
  strong.rule = AssumptionRule::Strong;
  auto sobs = gen_assumption_obligations(m, *m.find("Top"), strong);
  EXPECT_EQ(sobs[0].formula, 2);
  EXPECT_EQ(check(sobs[0]).verdict, Verdict::Falsified);
}

TEST(Assumptions, UnconnectedInputIsRejected) {
  auto m = model(R"(
component Dst { input i : int; assume "positive" : i > 0; }
system Top { sub v : Dst; }
)");
  EXPECT_THROW(gen_assumption_obligations(m, *m.find("Top")), Error);
}

TEST(Assumptions, CycleNeedsAnOrder) {
  REQUIRE_SOLVER();
  auto m = fixture("cyclic.rtc");
  auto obs = generate_obligations(m);
  CheckResult w = check(find(obs, "Loop: assumption w.positive input"));
  ASSERT_EQ(w.verdict, Verdict::Falsified);
  EXPECT_EQ(w.fail_step, 1u);
  EXPECT_EQ(check(find(obs, "Loop: assumption v.positive input")).verdict, Verdict::Proved);

  ComposeOptions weak;
  weak.rule = AssumptionRule::Weak;
  auto wobs = generate_obligations(m, weak);
  EXPECT_EQ(find(wobs, "Loop: assumption w.positive input").formula, 3);
  EXPECT_EQ(check(find(wobs, "Loop: assumption w.positive input")).verdict, Verdict::Proved);
  EXPECT_EQ(check(find(wobs, "Loop: assumption v.positive input")).verdict, Verdict::Proved);
}

TEST(Assumptions, ReversedOrderMovesTheFailure) {
  REQUIRE_SOLVER();
  auto m = fixture("cyclic.rtc");
  ComposeOptions o;
  o.order["Loop"] = {"v", "w"};
  auto obs = generate_obligations(m, o);
  EXPECT_EQ(check(find(obs, "Loop: assumption w.positive input")).verdict, Verdict::Proved);
  EXPECT_EQ(check(find(obs, "Loop: assumption v.positive input")).verdict, Verdict::Falsified);
}

TEST(Guarantees, NoSubcomponentsDegeneratesToContract) {
  auto m = model(R"(
system Top {
  input a : int;
  output b : int;
  assume "small" : a < 3;
  guarantee "bounded" : b < 3;
}
)");
  Obligation g = gen_guarantee_obligation(m, *m.find("Top"));
  EXPECT_EQ(g.formula, 1);
  EXPECT_EQ(to_source(g.property), "hist(a < 3) => b < 3");
  EXPECT_TRUE(gen_assumption_obligations(m, *m.find("Top")).empty());
}

TEST(Guarantees, PipelineAllProved) {
  REQUIRE_SOLVER();
  auto obs = generate_obligations(fixture("pipeline.rtc"));
  std::vector<std::string> names;
  for (const auto& o : obs) names.push_back(o.name);
  EXPECT_EQ(names, (std::vector<std::string>{
                       "Pipeline: assumption s.nonnegative input", "Pipeline: assumption a.nonnegative input",
                       "Pipeline: assumption c.nonnegative input", "Pipeline: guarantees", "Scale: contract",
                       "Acc: contract", "Clamp: contract"}));
  for (const auto& o : obs) EXPECT_EQ(check(o).verdict, Verdict::Proved) << o.name;
}

TEST(Guarantees, PatternGuaranteeUsesObserver) {
  auto m = model(R"(
component Relay {
  input a : bool;
  output b : bool;
  guarantee "echo" : whenever a occurs b occurs during [0.0, 5.0];
}
system Top {
  input x : bool;
  output y : bool;
  sub r : Relay;
  connect x -> r.a;
  connect r.b -> y;
  guarantee "echo" : whenever x occurs y occurs during [0.0, 5.0];
}
)");
  Obligation g = gen_guarantee_obligation(m, *m.find("Top"));
  EXPECT_TRUE(g.program.find("echo.run"));
  EXPECT_TRUE(g.program.find("r.echo.ok"));
  EXPECT_EQ(g.formula, 5);
}

TEST(Obligations, Deterministic) {
  auto a = generate_obligations(fixture("pipeline.rtc"));
  auto b = generate_obligations(fixture("pipeline.rtc"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(to_source(a[i].program), to_source(b[i].program));
    EXPECT_EQ(to_source(a[i].property), to_source(b[i].property));
  }
}

TEST(Obligations, SharedTypeVisitedOnce) {
  auto m = model(R"(
component Id { input i : int; output o : int; implementation { o = i; } }
system Two { input x : int; sub p : Id; sub q : Id; connect x -> p.i; connect p.o -> q.i; }
)");
  auto obs = generate_obligations(m);
  EXPECT_EQ(std::count_if(obs.begin(), obs.end(), [](const Obligation& o) { return o.component == "Id"; }), 1);
}

TEST(Obligations, SelfContainmentRejected) {
  auto m = model(R"(
component Loop { sub l : Loop; }
system Top { sub l : Loop; }
)");
  EXPECT_THROW(generate_obligations(m), Error);
  EXPECT_THROW(compose_monolithic(m), Error);
}

TEST(Monolithic, PrefixesInstances) {
  auto m = fixture("cyclic.rtc");
  SpecProgram p = compose_monolithic(m);
  for (const char* v : {"w.i", "w.o", "v.i", "v.o"}) EXPECT_TRUE(p.find(v)) << v;
  EXPECT_TRUE(p.properties.empty());
  EXPECT_EQ(to_source(compose_monolithic(fixture("pipeline.rtc")).properties.at(0).expr),
            "hist(x >= 0) => y >= 0 and y <= 10");
}

TEST(Monolithic, PipelineHoldsByEnumeration) {
  SpecProgram p = compose_monolithic(fixture("pipeline.rtc"));
  EnumerationDomain dom;
  dom.int_grid = {Rational(-1), Rational(0), Rational(1), Rational(3), Rational(7)};
  dom.horizon = 4;
  CheckResult r = check_invariant_explicit(p, p.properties.at(0).expr, dom);
  EXPECT_EQ(r.verdict, Verdict::Proved) << r.diagnostics;
}

// The flattened implementation admits exactly the traces in the three
// pattern trace sets of its constraints.
TEST(Monolithic, ConstraintTraceSetMatchesPatterns) {
  const char* src = R"(
system Bus {
  input new_message, thread_stop : bool;
  output thread_start : bool;
  implementation {
    assert "new message rate" : new_message occurs sporadic with IAT 50.0;
    assert "start on message" : always new_message = thread_start;
    assert "thread runtime" : whenever thread_start occurs thread_stop occurs during [10.0, 20.0];
  }
}
)";
  SystemModel m = model(src);
  SpecProgram p = compose_monolithic(m);
  EnumerationDomain dom;
  dom.time_deltas = {Rational(10), Rational(40)};
  dom.horizon = 4;
  std::vector<std::string> keep{"new_message", "thread_start", "thread_stop"};
  std::set<std::string> got;
  for (const auto& tr : enumerate_traces(p, dom)) got.insert(trace_to_json(tr.project(keep)));

  std::vector<Pattern> pats;
  for (const auto& pc : m.find("Bus")->body->patterns) pats.push_back(pc.pattern);
  SpecProgram bare;
  for (const auto& v : keep) bare.add_var(v, TypeTag::Bool);
  std::set<std::string> want;
  for (const auto& tr : enumerate_traces(bare, dom)) {
    bool in = std::all_of(pats.begin(), pats.end(), [&](const Pattern& q) { return pattern_membership(q, tr).in(); });
    if (in) want.insert(trace_to_json(tr));
  }
  EXPECT_FALSE(want.empty());
  EXPECT_EQ(got, want);
}

// Random pipelines: whenever every obligation is proved, the monolithic
// contract holds on every enumerated trace.
TEST(Property, CompositionalProofImpliesMonolithic) {
  REQUIRE_SOLVER();
  std::mt19937_64 rng(20261016);
  int proved = 0;
  for (int n = 0; n < 12; ++n) {
    std::uniform_int_distribution<int> bound(2, 9);
    int clamp = bound(rng), claim = bound(rng), top = bound(rng);
    std::string src = R"(
component Scale { input i : int; output o : int; assume "nonnegative input" : i >= 0;
  guarantee "doubled" : o = 2 * i; implementation { o = i + i; } }
component Clamp { input i : int; output o : int; assume "nonnegative input" : i >= 0;
  guarantee "bounded" : o >= 0 and o <= CLAIM; implementation { o = ite(i > CLAMP, CLAMP, i); } }
system Top { input x : int; output y : int; assume "nonnegative input" : x >= 0;
  sub s : Scale; sub c : Clamp; connect x -> s.i; connect s.o -> c.i; connect c.o -> y;
  guarantee "bounded output" : y <= TOP; }
)";
    for (auto [key, val] : {std::pair{"CLAIM", claim}, {"CLAMP", clamp}, {"TOP", top}})
      for (std::size_t at; (at = src.find(key)) != std::string::npos;) src.replace(at, std::strlen(key), std::to_string(val));
    SystemModel m = model(src);
    bool all = true;
    for (const auto& o : generate_obligations(m)) all = all && check(o).verdict == Verdict::Proved;
    SpecProgram mono = compose_monolithic(m);
    EnumerationDomain dom;
    dom.int_grid = {Rational(0), Rational(2), Rational(5)};
    dom.horizon = 3;
    bool holds = check_invariant_explicit(mono, mono.properties.at(0).expr, dom).verdict == Verdict::Proved;
    if (all) {
      ++proved;
      EXPECT_TRUE(holds) << src;
    }
    EXPECT_EQ(all, claim >= clamp && top >= claim) << src;
  }
  EXPECT_GT(proved, 0);
}
