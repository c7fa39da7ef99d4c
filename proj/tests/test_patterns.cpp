#include <gtest/gtest.h>

#include <random>
#include <tuple>

#include "rtc/enumerate.hpp"
#include "rtc/lowering.hpp"
#include "rtc/membership.hpp"
#include "rtc/oracle.hpp"
#include "rtc/source.hpp"

using namespace rtc;

namespace {

using Step = std::tuple<long, bool, bool>;  // time, c, e

TimedTrace ce(std::vector<Step> steps) {
  TimedTrace tr({"c", "e"});
  for (auto [t, c, e] : steps) tr.push(Rational(t), {{"c", Value::boolean(c)}, {"e", Value::boolean(e)}});
  return tr;
}

TimedTrace prefix(TimedTrace tr, std::size_t n) {
  while (tr.length() > n) tr.pop();
  return tr;
}

Interval closed(long l, long h) { return {Rational(l), Rational(h), true, true}; }

WheneverEventEvent wee(Interval iv, bool exclusive = false) { return {var("c"), var("e"), iv, exclusive}; }

SpecProgram host() { return parse_source("var c, e : bool;").program.program; }

// Straight transcription of the quantified definition with the finite-trace
// convention: a cause is violated once some later step lies past its window
// with no effect inside it.
bool naive_patt_out(const TimedTrace& tr, const Interval& iv) {
  std::size_t n = tr.length();
  for (std::size_t i = 1; i <= n; ++i) {
    if (!tr.at(i, "c").as_bool()) continue;
    bool discharged = false, expired = false;
    for (std::size_t j = i + 1; j <= n; ++j) {
      Rational d = tr.time(j) - tr.time(i);
      if (tr.at(j, "e").as_bool() && iv.contains(d)) discharged = true;
      if (!iv.below_high(d)) expired = true;
    }
    // An effect counts only if it comes before expiry, which holds because
    // times increase.
    if (expired && !discharged) return true;
  }
  return false;
}

// First prefix length that is out of the pattern's set.
std::optional<std::size_t> first_out(const std::function<MembershipResult(const TimedTrace&)>& m,
                                     const TimedTrace& tr) {
  for (std::size_t k = 1; k <= tr.length(); ++k)
    if (!m(prefix(tr, k)).in()) return k;
  return std::nullopt;
}

// Host plus the constraint lowering of `pat`, driven by the host values of `tr`.
std::optional<std::size_t> constraint_rejects(const Pattern& pat, const TimedTrace& tr) {
  SpecProgram p = host();
  apply_bundle(p, compile_constraint(pat, p, "k."), "restriction");
  Simulation s = simulate(p, tr);
  if (!s.violation) return std::nullopt;
  return s.violation->step;
}

// Does some single recorded cause drive the observer's property false?
bool observer_fails(const Pattern& pat, const TimedTrace& tr) {
  SpecProgram p = host();
  ObserverBundle b = compile_property_observer(pat, p, "o.");
  apply_bundle(p, b, "observer");
  std::string rec;
  for (const auto& v : b.fresh_vars)
    if (v.name.ends_with("rec_c")) rec = v.name;
  for (std::size_t k = 0; k <= tr.length(); ++k) {
    TimedTrace in({"c", "e", rec});
    for (std::size_t i = 1; i <= tr.length(); ++i)
      in.push(tr.time(i), {{"c", tr.at(i, "c")}, {"e", tr.at(i, "e")}, {rec, Value::boolean(i == k)}});
    Simulation s = simulate(p, in);
    if (s.violation) continue;  // k is not a cause
    if (check_invariant_on_trace(*b.property, s.trace)) return true;
  }
  return false;
}

}  // namespace

TEST(ParsePattern, Examples) {
  auto p = parse_pattern("whenever thread_start occurs thread_stop occurs during [10.0, 20.0]");
  const auto& w = std::get<WheneverEventEvent>(p);
  EXPECT_EQ(w.cause, var("thread_start"));
  EXPECT_EQ(w.window, closed(10, 20));
  EXPECT_FALSE(w.exclusive);

  auto s = std::get<Sporadic>(parse_pattern("new_message occurs sporadic with IAT 50.0"));
  EXPECT_EQ(s.iat, 50);
  EXPECT_EQ(s.jitter, 0);

  EXPECT_THROW(parse_pattern("whenever a occurs b occurs during [20.0, 10.0]"), Error);
}

TEST(ParsePattern, BracketsFlagsAndForms) {
  auto w = std::get<WheneverEventEvent>(parse_pattern("whenever a occurs b exclusively occurs during (10.0, 50.0]"));
  EXPECT_TRUE(w.exclusive);
  EXPECT_FALSE(w.window.low_closed);
  EXPECT_TRUE(w.window.high_closed);

  auto per = std::get<Periodic>(parse_pattern("msg occurs each 10000.0 with jitter 50.0"));
  EXPECT_EQ(per.period, 10000);
  EXPECT_EQ(per.jitter, 50);
  EXPECT_TRUE(std::holds_alternative<WheneverEventCondition>(parse_pattern("whenever a occurs b holds during [0.0, 5.0]")));
  EXPECT_TRUE(std::holds_alternative<WhenConditionEvent>(
      parse_pattern("when a holds during [5.0, 5.0] b occurs during [0.0, 10.0]")));
  EXPECT_TRUE(std::holds_alternative<Always>(parse_pattern("always a = b")));

  EXPECT_THROW(parse_pattern("msg occurs each 10.0 with jitter 5.0"), Error);
  EXPECT_THROW(parse_pattern("whenever a occurs b occurs during [-1.0, 10.0]"), Error);
  EXPECT_THROW(parse_pattern("whenever a happens b occurs during [1.0, 10.0]"), Error);
}

TEST(ParsePattern, PrintParseRoundTrip) {
  for (const char* text : {"whenever a occurs b exclusively occurs during [10.0, 50.0)",
                           "whenever a and b occurs not c holds during (0.0, 5.0]",
                           "when a holds during [5.0, 5.0] b occurs during [0.0, 10.0]", "always a = b",
                           "msg occurs each 10000.0 with jitter 50.0", "m occurs sporadic with IAT 5.0 and jitter 1.0"}) {
    Pattern p = parse_pattern(text);
    EXPECT_EQ(parse_pattern(to_source(p)), p) << text;
  }
}

TEST(Membership, PattExamples) {
  auto pat = Pattern(wee(closed(10, 20)));
  EXPECT_TRUE(pattern_membership(pat, ce({{0, true, false}, {15, false, true}})).in());
  auto out = pattern_membership(pat, ce({{0, true, false}, {25, false, true}, {30, false, false}}));
  EXPECT_EQ(out.verdict, Membership::Out);
  EXPECT_EQ(out.witness, 1u);
  EXPECT_EQ(pattern_membership(pat, ce({{0, false, true}, {15, false, true}})).verdict, Membership::In);
  EXPECT_EQ(pattern_membership(pat, ce({{0, true, false}, {5, false, false}})).verdict, Membership::InPending);
}

TEST(Membership, SameInstantEffectDoesNotDischarge) {
  auto pat = Pattern(wee(closed(0, 20)));
  EXPECT_EQ(pattern_membership(pat, ce({{0, true, true}, {30, false, false}})).verdict, Membership::Out);
}

TEST(Membership, MinSeparationExample) {
  TimedTrace tr({"new_message"});
  tr.push(Rational(0), {{"new_message", Value::boolean(true)}});
  tr.push(Rational(40), {{"new_message", Value::boolean(true)}});
  EXPECT_FALSE(membership_min_separation(var("new_message"), Rational(50), tr).in());
  Pattern sp = parse_pattern("new_message occurs sporadic with IAT 50.0");
  EXPECT_FALSE(pattern_membership(sp, tr).in());
}

TEST(Membership, PropConsExamples) {
  auto w = wee(closed(10, 20));
  auto two_c = ce({{0, true, false}, {15, true, false}});
  auto pc = membership_prop_cons(w, two_c);
  EXPECT_TRUE(pc.cons.in());
  EXPECT_FALSE(pc.prop.in());
  // Extending past the second window shows L_patt rejects what L_cons admits
  // up to the first cause.
  auto longer = ce({{0, true, false}, {15, true, false}, {25, false, false}});
  EXPECT_EQ(membership_patt(w, longer).witness, 1u);
  EXPECT_TRUE(membership_cons(w, prefix(longer, 2)).in());
  EXPECT_TRUE(membership_prop_cons(w, ce({{0, true, false}, {15, false, true}})).cons.in());
}

TEST(Observer, Fig3ConstraintsLiteral) {
  auto b = compile_property_observer(Pattern(wee(closed(10, 20))), host());
  ASSERT_EQ(b.constraints.size(), 4u);
  EXPECT_EQ(to_source(b.constraints[3].expr), "pass = (timer <= 20.0)");
  EXPECT_EQ(to_source(b.constraints[2].expr), "rec_c => c");
  EXPECT_EQ(to_source(b.constraints[1].expr), "timer = (0.0 -> ite(pre(run), pre(timer) + (t - pre(t)), 0.0))");
  EXPECT_EQ(to_source(b.constraints[0].expr),
            "run = (rec_c -> ite(pre(run) and e and (10.0 <= timer and timer <= 20.0), false, ite(rec_c, true, pre(run))))");
  ASSERT_TRUE(b.property);
  EXPECT_EQ(*b.property, var("pass"));
}

TEST(Observer, NoRecordKeepsPassTrue) {
  SpecProgram p = host();
  auto b = compile_property_observer(Pattern(wee(closed(10, 20))), p);
  apply_bundle(p, b, "observer");
  TimedTrace in({"c", "e", "rec_c"});
  for (long t : {0, 7, 30, 31})
    in.push(Rational(t), {{"c", Value::boolean(true)}, {"e", Value::boolean(false)}, {"rec_c", Value::boolean(false)}});
  Simulation s = simulate(p, in);
  ASSERT_FALSE(s.violation);
  for (std::size_t i = 1; i <= 4; ++i) {
    EXPECT_EQ(s.trace.at(i, "pass"), Value::boolean(true));
    EXPECT_EQ(s.trace.at(i, "timer"), Value::real(0));
  }
}

TEST(Observer, RecordedCauseWithoutEffectFails) {
  SpecProgram p = host();
  auto b = compile_property_observer(Pattern(wee(closed(10, 20))), p);
  apply_bundle(p, b, "observer");
  TimedTrace in({"c", "e", "rec_c"});
  long times[] = {0, 10, 20, 25, 30};
  for (std::size_t i = 0; i < 5; ++i)
    in.push(Rational(times[i]),
            {{"c", Value::boolean(i == 0)}, {"e", Value::boolean(false)}, {"rec_c", Value::boolean(i == 0)}});
  Simulation s = simulate(p, in);
  ASSERT_FALSE(s.violation);
  EXPECT_EQ(check_invariant_on_trace(var("pass"), s.trace), 4u);
  EXPECT_EQ(s.trace.at(4, "timer"), Value::real(25));
}

TEST(Observer, NamesNeverCollide) {
  SpecProgram p = parse_source("var c, e, run, pass : bool; var timer : real;").program.program;
  auto b = compile_property_observer(Pattern(wee(closed(10, 20))), p);
  for (const auto& v : b.fresh_vars) EXPECT_EQ(p.find(v.name), nullptr) << v.name;
  EXPECT_EQ(*b.property, var("pass_1"));
}

TEST(Constraint, SporadicExamples) {
  Pattern sp = parse_pattern("c occurs sporadic with IAT 50.0");
  EXPECT_FALSE(constraint_rejects(sp, ce({{0, true, false}, {50, true, false}, {120, true, false}})));
  EXPECT_EQ(constraint_rejects(sp, ce({{0, true, false}, {40, true, false}})), 2u);
}

TEST(Constraint, AlwaysExamples) {
  Pattern al = parse_pattern("always c = e");
  EXPECT_FALSE(constraint_rejects(al, ce({{0, true, true}, {5, false, false}})));
  EXPECT_EQ(constraint_rejects(al, ce({{0, true, true}, {5, true, false}})), 2u);
}

TEST(Constraint, ResponseAdmitsLConsOddity) {
  Pattern w = Pattern(wee(closed(10, 20)));
  auto ok = ce({{0, true, false}, {15, false, true}});
  auto odd = ce({{0, true, false}, {15, true, false}});
  EXPECT_FALSE(constraint_rejects(w, ok));
  EXPECT_FALSE(constraint_rejects(w, odd));
  EXPECT_TRUE(membership_cons(wee(closed(10, 20)), ok).in());
  EXPECT_TRUE(membership_cons(wee(closed(10, 20)), odd).in());
  EXPECT_EQ(constraint_rejects(w, ce({{0, true, false}, {15, false, false}, {25, false, false}})), 3u);
}

TEST(Constraint, WhenHoldsOccursUnsupported) {
  Pattern p = parse_pattern("when c holds during [5.0, 5.0] e occurs during [0.0, 10.0]");
  EXPECT_THROW(compile_constraint(p, host()), UnsupportedLowering);
}

TEST(Constraint, ResponseAddsDeadlineTimeoutOnTimedHosts) {
  SpecProgram timed = parse_source("var c, e : bool; var to : real; timeout to; to = (5.0 -> pre(to) + 5.0);")
                          .program.program;
  auto b = compile_constraint(Pattern(wee(closed(10, 20))), timed);
  ASSERT_EQ(b.timeouts.size(), 1u);
  EXPECT_TRUE(compile_constraint(Pattern(wee(closed(10, 20))), host()).timeouts.empty());
}

TEST(SideCondition, BusThreadHostSatisfiesIt) {
  ProgramSource src = parse_source(R"(
    var new_message, thread_start, thread_stop : bool;
    assert new_message occurs sporadic with IAT 50.0;
    assert new_message = thread_start;
  )").program;
  SpecProgram p = elaborate(src).program;
  WheneverEventEvent w{var("thread_start"), var("thread_stop"), closed(10, 20), false};
  auto side = compile_prop_side_condition(w, p);
  apply_bundle(p, side, "side");
  EnumerationDomain dom;
  dom.time_deltas = {Rational(10), Rational(25), Rational(50)};
  dom.horizon = 5;
  std::size_t seen = 0;
  TraceEnumerator(p, dom).run([&](const TimedTrace& tr) {
    ++seen;
    EXPECT_TRUE(eval_bool(*side.property, tr, tr.length()));
    return true;
  });
  EXPECT_GT(seen, 100u);
}

TEST(SideCondition, RepeatedCauseFailsWithTwoCauseWitness) {
  SpecProgram p = host();
  auto side = compile_prop_side_condition(wee(closed(10, 20)), p);
  apply_bundle(p, side, "side");
  EnumerationDomain dom;
  dom.time_deltas = {Rational(15)};
  dom.horizon = 2;
  std::optional<TimedTrace> cex;
  TraceEnumerator(p, dom).run([&](const TimedTrace& tr) {
    if (!eval_bool(*side.property, tr, tr.length()) && !cex) cex = tr;
    return true;
  });
  ASSERT_TRUE(cex);
  EXPECT_TRUE(cex->at(1, "c").as_bool());
  EXPECT_TRUE(cex->at(2, "c").as_bool());
}

TEST(SideCondition, SingleCauseHoldsVacuously) {
  SpecProgram p = parse_source("var c, e : bool; c = (true -> false);").program.program;
  auto side = compile_prop_side_condition(wee(closed(10, 20)), p);
  apply_bundle(p, side, "side");
  EnumerationDomain dom;
  dom.time_deltas = {Rational(5), Rational(10)};
  dom.horizon = 5;
  TraceEnumerator(p, dom).run([&](const TimedTrace& tr) {
    EXPECT_TRUE(eval_bool(*side.property, tr, tr.length()));
    return true;
  });
}

TEST(Elaborate, NamesAndKinds) {
  auto ep = load_program_text(R"(
    var c, e : bool;
    assert "resp" : whenever c occurs e occurs during [10.0, 20.0];
    property "watch" : whenever e occurs c occurs during [0.0, 5.0];
  )");
  ASSERT_EQ(ep.program.properties.size(), 2u);
  EXPECT_EQ(ep.program.properties[0].name, "resp.side");
  EXPECT_EQ(ep.kinds[0], PropertyKind::SideCondition);
  EXPECT_EQ(ep.program.properties[1].name, "watch");
  EXPECT_TRUE(ep.program.find("resp.ok"));
  EXPECT_TRUE(ep.program.find("watch.pass"));
}

TEST(Emit, BundleSourceReparses) {
  SpecProgram h = host();
  for (const char* text : {"whenever c occurs e exclusively occurs during [10.0, 20.0]",
                           "c occurs sporadic with IAT 5.0 and jitter 1.0", "c occurs each 10.0 with jitter 2.0",
                           "whenever c occurs e holds during [0.0, 5.0]"}) {
    Pattern pat = parse_pattern(text);
    for (auto b : {compile_constraint(pat, h), compile_property_observer(pat, h)}) {
      std::string src = "var c, e : bool;\n" + to_source(b);
      EXPECT_NO_THROW(parse_source(src)) << src;
    }
  }
}

// Properties over random traces.

TEST(Property, PattMembershipMatchesNaiveDefinition) {
  std::mt19937_64 rng(11);
  for (const Interval& iv : {closed(10, 20), Interval{Rational(10), Rational(20), false, false}, closed(0, 0)}) {
    for (int k = 0; k < 3000; ++k) {
      TimedTrace tr = random_ce_trace(rng, 8, 12);
      EXPECT_EQ(membership_patt(wee(iv), tr).verdict == Membership::Out, naive_patt_out(tr, iv))
          << trace_to_json(tr);
    }
  }
}

TEST(Property, PattWithinCons) {
  SuiteReport r = inclusion_suite(3, 10000, closed(10, 20));
  EXPECT_TRUE(r.ok()) << (r.details.empty() ? "" : r.details[0]);
  EXPECT_EQ(r.cases, 10000u);
}

TEST(Property, ConstraintLoweringMatchesDefinitions) {
  std::mt19937_64 rng(5);
  std::vector<std::pair<Pattern, std::function<MembershipResult(const TimedTrace&)>>> cases;
  for (bool excl : {false, true}) {
    auto w = wee(closed(10, 20), excl);
    cases.push_back({Pattern(w), [w](const TimedTrace& tr) { return membership_cons(w, tr); }});
  }
  auto half_open = wee(Interval{Rational(5), Rational(15), false, true});
  cases.push_back({Pattern(half_open), [half_open](const TimedTrace& tr) { return membership_cons(half_open, tr); }});
  for (const char* text : {"c occurs sporadic with IAT 12.0", "c occurs sporadic with IAT 12.0 and jitter 3.0",
                           "c occurs each 12.0", "c occurs each 12.0 with jitter 3.0", "always c => e",
                           "whenever c occurs e holds during [0.0, 10.0]"}) {
    Pattern pat = parse_pattern(text);
    cases.push_back({pat, [pat](const TimedTrace& tr) { return pattern_membership(pat, tr); }});
  }
  for (const auto& [pat, member] : cases) {
    for (int k = 0; k < 1500; ++k) {
      TimedTrace tr = random_ce_trace(rng, 8, 10);
      EXPECT_EQ(constraint_rejects(pat, tr), first_out(member, tr)) << to_source(pat) << " on " << trace_to_json(tr);
    }
  }
}

TEST(Property, ConditionWindowConstraintIsSoundWhenDelayed) {
  std::mt19937_64 rng(9);
  Pattern pat = parse_pattern("whenever c occurs e holds during [4.0, 10.0]");
  for (int k = 0; k < 3000; ++k) {
    TimedTrace tr = random_ce_trace(rng, 8, 6);
    // Rejection by the constraint implies the trace is out of the set.
    if (auto step = constraint_rejects(pat, tr)) EXPECT_FALSE(pattern_membership(pat, prefix(tr, *step)).in());
  }
}

TEST(Property, ObserverMatchesMembershipOnRandomTraces) {
  std::mt19937_64 rng(21);
  for (const char* text :
       {"whenever c occurs e occurs during [10.0, 20.0]", "whenever c occurs e occurs during (10.0, 20.0)",
        "whenever c occurs e exclusively occurs during [5.0, 15.0]", "whenever c occurs e holds during [2.0, 10.0]",
        "when c holds during [5.0, 12.0] e occurs during [0.0, 10.0]"}) {
    Pattern pat = parse_pattern(text);
    for (int k = 0; k < 600; ++k) {
      TimedTrace tr = random_ce_trace(rng, 7, 9);
      EXPECT_EQ(observer_fails(pat, tr), !pattern_membership(pat, tr).in()) << text << " on " << trace_to_json(tr);
    }
  }
}

TEST(Property, ObserverNonInterference) {
  std::mt19937_64 rng(4);
  SpecProgram p = host();
  auto b = compile_property_observer(Pattern(wee(closed(10, 20))), p);
  apply_bundle(p, b, "observer");
  for (int k = 0; k < 1000; ++k) {
    TimedTrace tr = random_ce_trace(rng, 8, 12);
    TimedTrace in({"c", "e", "rec_c"});
    for (std::size_t i = 1; i <= tr.length(); ++i)
      in.push(tr.time(i), {{"c", tr.at(i, "c")}, {"e", tr.at(i, "e")}, {"rec_c", Value::boolean(false)}});
    Simulation s = simulate(p, in);
    ASSERT_FALSE(s.violation);
    EXPECT_FALSE(trace_admissible(p, s.trace));
    EXPECT_FALSE(check_invariant_on_trace(var("pass"), s.trace));
  }
}

TEST(Property, ViolationLatchesWithSingleRecord) {
  std::mt19937_64 rng(8);
  SpecProgram p = host();
  auto b = compile_property_observer(Pattern(wee(closed(10, 20))), p);
  apply_bundle(p, b, "observer");
  for (int k = 0; k < 1000; ++k) {
    TimedTrace tr = random_ce_trace(rng, 10, 12);
    for (std::size_t r = 1; r <= tr.length(); ++r) {
      if (!tr.at(r, "c").as_bool()) continue;
      TimedTrace in({"c", "e", "rec_c"});
      for (std::size_t i = 1; i <= tr.length(); ++i)
        in.push(tr.time(i), {{"c", tr.at(i, "c")}, {"e", tr.at(i, "e")}, {"rec_c", Value::boolean(i == r)}});
      Simulation s = simulate(p, in);
      ASSERT_FALSE(s.violation);
      bool failed = false;
      for (std::size_t i = 1; i <= s.trace.length(); ++i) {
        bool pass = s.trace.at(i, "pass").as_bool();
        if (failed) EXPECT_FALSE(pass);
        failed = failed || !pass;
      }
    }
  }
}

TEST(Property, SideConditionMatchesLProp) {
  std::mt19937_64 rng(13);
  for (const Interval& iv : {closed(10, 20), Interval{Rational(5), Rational(15), false, false}}) {
    SpecProgram p = host();
    auto w = wee(iv);
    auto side = compile_prop_side_condition(w, p);
    apply_bundle(p, side, "side");
    for (int k = 0; k < 3000; ++k) {
      TimedTrace tr = random_ce_trace(rng, 8, 10);
      Simulation s = simulate(p, tr);
      ASSERT_FALSE(s.violation);
      auto fails = check_invariant_on_trace(*side.property, s.trace);
      EXPECT_EQ(fails, first_out([&](const TimedTrace& t) { return membership_prop(w, t); }, tr))
          << trace_to_json(tr);
    }
  }
}

TEST(Property, ObserverEquivalenceSmallFamily) {
  EnumerationDomain dom;
  dom.time_deltas = {Rational(5), Rational(10)};
  dom.horizon = 4;
  for (const Interval& iv : {Interval{Rational(10), Rational(20), false, true},
                             Interval{Rational(10), Rational(20), true, false}, closed(0, 10), closed(10, 10)}) {
    SuiteReport r = observer_equivalence_suite(observer_hosts(), iv, dom);
    EXPECT_TRUE(r.ok()) << (r.details.empty() ? "" : r.details[0]);
  }
}

TEST(Property, ConstraintEquivalenceSmallFamily) {
  EnumerationDomain dom;
  dom.time_deltas = {Rational(5), Rational(10)};
  dom.horizon = 4;
  for (const Interval& iv : {Interval{Rational(10), Rational(20), false, false}, closed(0, 10)}) {
    SuiteReport r = constraint_equivalence_suite(prop_hosts(iv), iv, dom);
    EXPECT_TRUE(r.ok()) << (r.details.empty() ? "" : r.details[0]);
  }
}
