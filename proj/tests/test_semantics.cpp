#include <gtest/gtest.h>

#include <random>

#include "rtc/semantics.hpp"
#include "rtc/source.hpp"

using namespace rtc;

namespace {

SpecProgram program(const char* text) { return parse_source(text).program.program; }

TimedTrace ints(const std::string& name, std::vector<long> xs, std::vector<long> times = {}) {
  TimedTrace tr({name});
  for (std::size_t i = 0; i < xs.size(); ++i)
    tr.push(Rational(times.empty() ? static_cast<long>(i) : times[i]), {{name, Value::integer(xs[i])}});
  return tr;
}

TimedTrace bools(std::vector<bool> xs) {
  TimedTrace tr({"e"});
  for (std::size_t i = 0; i < xs.size(); ++i) tr.push(Rational(static_cast<long>(i)), {{"e", Value::boolean(xs[i])}});
  return tr;
}

}  // namespace

TEST(Eval, CounterDefinitionHolds) {
  Expr c = parse_expr("x = (0 -> pre(x) + 1)");
  auto tr = ints("x", {0, 1, 2, 3});
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_TRUE(eval_bool(c, tr, i));
  EXPECT_EQ(eval_expr(parse_expr("0 -> pre(x) + 1"), tr, 3), Value::integer(2L));
}

TEST(Eval, ArrowAndIte) {
  auto tr = ints("a", {4, 5, 6});
  Expr e = parse_expr("true -> false");
  EXPECT_TRUE(eval_bool(e, tr, 1));
  EXPECT_FALSE(eval_bool(e, tr, 2));
  EXPECT_FALSE(eval_bool(e, tr, 3));
  for (std::size_t i = 1; i <= 3; ++i) EXPECT_EQ(eval_expr(parse_expr("ite(true, a, 0)"), tr, i), tr.at(i, "a"));
}

TEST(Eval, PreAtFirstStepIsError) {
  auto tr = ints("x", {0, 1});
  EXPECT_THROW(eval_expr(parse_expr("pre(x)"), tr, 1), EvalError);
  EXPECT_EQ(eval_expr(parse_expr("pre(x)"), tr, 2), Value::integer(0L));
}

TEST(Eval, IntegerDivisionIsEuclidean) {
  auto tr = ints("x", {-7});
  EXPECT_EQ(eval_expr(parse_expr("x / 2"), tr, 1), Value::integer(-4L));
  EXPECT_EQ(eval_expr(parse_expr("x / -2"), tr, 1), Value::integer(4L));
  EXPECT_EQ(eval_expr(parse_expr("7 / -2"), tr, 1), Value::integer(-3L));
  EXPECT_THROW(eval_expr(parse_expr("x / 0"), tr, 1), EvalError);
}

TEST(MinPos, Examples) {
  std::vector<Value> a{Value::real(20), Value::real(40)};
  EXPECT_EQ(min_pos(a), 20);
  std::vector<Value> b{Value::real(-5), Value::real(15), Value::infinity()};
  EXPECT_EQ(min_pos(b), 15);
  std::vector<Value> c{Value::real(-5), Value::real(-10)};
  EXPECT_THROW(min_pos(c), CalendarExhausted);
  std::vector<Value> d{Value::real(7), Value::real(7)};
  EXPECT_EQ(min_pos(d), 7);
}

TEST(AdvanceTime, Examples) {
  EXPECT_EQ(advance_time(Rational(0), Calendar{{Value::real(50), Value::infinity()}}), 50);
  EXPECT_EQ(advance_time(Rational(10), Calendar{{Value::real(60), Value::real(15)}}), 15);
  EXPECT_EQ(advance_time(std::nullopt, Calendar{{Value::real(60)}}), 0);
  EXPECT_THROW(advance_time(Rational(10), Calendar{{Value::real(10), Value::infinity()}}), CalendarExhausted);
}

TEST(Admissible, Counter) {
  SpecProgram p = program("x : int; x = (0 -> pre(x) + 1);");
  EXPECT_FALSE(trace_admissible(p, ints("x", {0, 1, 2})));
  auto v = trace_admissible(p, ints("x", {0, 1, 5}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->step, 3u);
  EXPECT_EQ(v->constraint, "constraint_1");
}

TEST(Admissible, TimeMustProgress) {
  SpecProgram p = program("x : int; x = (0 -> pre(x) + 1);");
  auto v = trace_admissible(p, ints("x", {0, 1}, {0, 0}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->step, 2u);
  EXPECT_EQ(v->constraint, kTimeProgress);
  EXPECT_TRUE(trace_admissible(p, ints("x", {0}, {3})));
}

TEST(Admissible, CalendarConstraint) {
  SpecProgram p = program("to : real; timeout to; to = (50.0 -> ite(pre(t) = pre(to), pre(to) + 50.0, pre(to)));");
  TimedTrace ok({"to"});
  ok.push(Rational(0), {{"to", Value::real(50)}});
  ok.push(Rational(50), {{"to", Value::real(50)}});
  ok.push(Rational(100), {{"to", Value::real(100)}});
  EXPECT_FALSE(trace_admissible(p, ok));
  TimedTrace early({"to"});
  early.push(Rational(0), {{"to", Value::real(50)}});
  early.push(Rational(40), {{"to", Value::real(50)}});
  auto v = trace_admissible(p, early);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->constraint, kCalendar);
  TimedTrace stuck({"to"});
  stuck.push(Rational(0), {{"to", Value::infinity()}});
  stuck.push(Rational(40), {{"to", Value::infinity()}});
  SpecProgram q = program("to : real; timeout to;");
  v = trace_admissible(q, stuck);
  ASSERT_TRUE(v);
  EXPECT_NE(v->detail.find("exhausted"), std::string::npos);
}

TEST(HistInitz, Examples) {
  Expr e = var("e");
  auto tr = bools({true, true, false, true});
  std::vector<bool> h;
  for (std::size_t i = 1; i <= 4; ++i) h.push_back(eval_historically(e, tr, i));
  EXPECT_EQ(h, (std::vector<bool>{true, true, false, false}));
  auto all = bools({true, true, true});
  for (std::size_t i = 1; i <= 3; ++i) {
    EXPECT_TRUE(eval_historically(e, all, i));
    EXPECT_TRUE(eval_z(e, all, i));
  }
  auto ftf = bools({false, true, false});
  std::vector<bool> z;
  for (std::size_t i = 1; i <= 3; ++i) z.push_back(eval_z(e, ftf, i));
  EXPECT_EQ(z, (std::vector<bool>{true, false, true}));
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_EQ(eval_bool(hist(e), tr, i), eval_historically(e, tr, i));
}

TEST(Invariant, Examples) {
  auto tr = ints("x", {0, 1, 2});
  EXPECT_FALSE(check_invariant_on_trace(parse_expr("x >= 0"), tr));
  EXPECT_EQ(check_invariant_on_trace(parse_expr("x < 2"), tr), 3u);
  EXPECT_FALSE(check_invariant_on_trace(parse_expr("true -> t > pre(t)"), tr));
}

TEST(Divergence, Threshold) {
  auto tr = ints("x", {0, 1, 2}, {0, 10, 30});
  EXPECT_TRUE(time_diverges(tr, Rational(30)));
  EXPECT_FALSE(time_diverges(tr, Rational(31)));
}

TEST(TraceJson, RoundTripExact) {
  TimedTrace tr({"b", "x", "r", "to"});
  tr.push(Rational(0), {{"b", Value::boolean(true)}, {"x", Value::integer(3L)}, {"r", Value::real(Rational(1, 3))},
                        {"to", Value::infinity()}});
  tr.push(Rational(15), {{"b", Value::boolean(false)}, {"x", Value::integer(-2L)}, {"r", Value::real(Rational(-7, 2))},
                         {"to", Value::real(20)}});
  std::string js = trace_to_json(tr);
  EXPECT_NE(js.find("\"15/1\""), std::string::npos);
  EXPECT_EQ(trace_from_json(js), tr);
}

// --- properties over random traces -------------------------------------------

TEST(Property, HistMonotoneIdempotentAndRecurrent) {
  std::mt19937 rng(3);
  for (int n = 0; n < 300; ++n) {
    std::vector<bool> xs;
    std::size_t len = 1 + rng() % 8;
    for (std::size_t i = 0; i < len; ++i) xs.push_back(rng() % 4 != 0);
    auto tr = bools(xs);
    Expr e = var("e");
    bool prev = true;
    for (std::size_t i = 1; i <= len; ++i) {
      bool h = eval_bool(hist(e), tr, i);
      EXPECT_LE(h, prev);
      prev = h;
      EXPECT_EQ(eval_bool(hist(hist(e)), tr, i), h);
      EXPECT_EQ(h, eval_bool(initz(hist(e)), tr, i) && eval_bool(e, tr, i));
    }
  }
}

TEST(Property, AdvanceTimeStrictlyIncreases) {
  std::mt19937 rng(5);
  for (int n = 0; n < 500; ++n) {
    Rational prev(static_cast<long>(rng() % 100), static_cast<long>(1 + rng() % 4));
    Calendar cal;
    for (int k = 0; k < 3; ++k) {
      if (rng() % 4 == 0) cal.timeouts.push_back(Value::infinity());
      else cal.timeouts.push_back(Value::real(Rational(static_cast<long>(rng() % 200), 2)));
    }
    try {
      EXPECT_GT(advance_time(prev, cal), prev);
    } catch (const CalendarExhausted&) {
      for (const auto& v : cal.timeouts) EXPECT_TRUE(v.is_infinity() || v.as_rational() <= prev);
    }
  }
}

TEST(Property, EvaluationDeterministic) {
  SpecProgram p = program("x : int; x = (0 -> pre(x) + 1); property x / 3 >= 0;");
  auto tr = ints("x", {0, 1, 2, 3, 4});
  for (std::size_t i = 1; i <= tr.length(); ++i)
    EXPECT_EQ(eval_expr(p.transition[0].expr.arg(1), tr, i), eval_expr(p.transition[0].expr.arg(1), tr, i));
  EXPECT_EQ(trace_admissible(p, tr).has_value(), trace_admissible(p, tr).has_value());
}
