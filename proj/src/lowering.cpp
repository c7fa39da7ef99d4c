#include "rtc/lowering.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rtc/typecheck.hpp"
#include "rtc/wellformed.hpp"

namespace rtc {

std::string_view to_string(BundleMode m) {
  switch (m) {
    case BundleMode::PropertyObserver: return "property-observer";
    case BundleMode::Constraint: return "constraint";
    case BundleMode::PropSideCondition: return "prop-side-condition";
  }
  return "?";
}

namespace {

Expr clock() { return var(std::string(kTimeVar)); }
Expr real(const Rational& q) { return lit_real(q); }
Expr zero() { return lit_real(0); }

Expr above_low(const Interval& iv, Expr d) { return iv.low_closed ? le(real(iv.low), d) : lt(real(iv.low), d); }
Expr below_high(const Interval& iv, Expr d) { return iv.high_closed ? le(d, real(iv.high)) : lt(d, real(iv.high)); }
Expr within(const Interval& iv, const Expr& d) { return land(above_low(iv, d), below_high(iv, d)); }

Expr max_of(Expr a, Expr b) { return ite(ge(a, b), a, b); }
Expr min_of(Expr a, Expr b) { return ite(le(a, b), a, b); }
Expr minus(Expr a, const Rational& q) { return q == 0 ? a : sub(std::move(a), real(q)); }
Expr plus(Expr a, const Rational& q) { return q == 0 ? a : add(std::move(a), real(q)); }

// Allocates names that collide with nothing in the host or the bundle.
class Namer {
 public:
  Namer(const SpecProgram& host, ObserverBundle& b, std::string prefix)
      : host_(host), b_(b), prefix_(std::move(prefix)) {}

  Expr fresh(const std::string& base, TypeTag type) {
    std::string name = prefix_ + base;
    for (int k = 1; taken(name); ++k) name = prefix_ + base + "_" + std::to_string(k);
    b_.fresh_vars.push_back({name, type, {}});
    return var(name);
  }

  void define(const Expr& v, Expr rhs) { b_.constraints.push_back({v.name() + "_def", eq(v, std::move(rhs))}); }
  void restrict(std::string name, Expr e) { b_.constraints.push_back({prefix_ + name, std::move(e)}); }

 private:
  bool taken(const std::string& n) const {
    if (n == kTimeVar || host_.find(n)) return true;
    for (const auto& v : b_.fresh_vars)
      if (v.name == n) return true;
    return false;
  }

  const SpecProgram& host_;
  ObserverBundle& b_;
  std::string prefix_;
};

// The run/timer/rec_c/pass observer for "whenever c occurs e occurs during iv".
void response_observer(Namer& nm, ObserverBundle& b, const Expr& c, const Expr& e, const Interval& iv) {
  Expr run = nm.fresh("run", TypeTag::Bool);
  Expr timer = nm.fresh("timer", TypeTag::Real);
  Expr rec = nm.fresh("rec_c", TypeTag::Bool);
  Expr pass = nm.fresh("pass", TypeTag::Bool);
  nm.define(run, arrow(rec, ite(land(land(pre(run), e), within(iv, timer)), lit(false), ite(rec, lit(true), pre(run)))));
  nm.define(timer, arrow(zero(), ite(pre(run), add(pre(timer), sub(clock(), pre(clock()))), zero())));
  nm.restrict("rec_c_cause", implies(rec, c));
  nm.define(pass, below_high(iv, timer));
  b.property = pass;
}

// Latest time at or before now at which `c` held.
Expr last_time(Namer& nm, const std::string& base, const Expr& c) {
  Expr lc = nm.fresh(base, TypeTag::Real);
  nm.define(lc, ite(c, clock(), arrow(zero(), pre(lc))));
  return lc;
}

// `c` has held at some step up to now.
Expr seen(Namer& nm, const std::string& base, const Expr& c) {
  Expr h = nm.fresh(base, TypeTag::Bool);
  nm.define(h, lor(c, arrow(lit(false), pre(h))));
  return h;
}

Expr ok_var(Namer& nm, Expr def) {
  Expr ok = nm.fresh("ok", TypeTag::Bool);
  nm.define(ok, std::move(def));
  return ok;
}

void whenever_cons(Namer& nm, ObserverBundle& b, const WheneverEventEvent& p, bool timed) {
  const Interval& iv = p.window;
  Expr lc = last_time(nm, "lc", p.cause);
  Expr pend = nm.fresh("pend", TypeTag::Bool);
  Expr elapsed = sub(clock(), pre(lc));
  nm.define(pend, lor(p.cause, arrow(lit(false), land(pre(pend), lnot(land(p.effect, within(iv, elapsed)))))));
  Expr ok = arrow(lit(true), implies(pre(pend), below_high(iv, elapsed)));
  if (p.exclusive) {
    Expr hc = seen(nm, "hc", p.cause);
    ok = land(ok, implies(p.effect, arrow(lit(false), land(pre(hc), within(iv, elapsed)))));
  }
  b.restriction = ok_var(nm, ok);
  if (timed) {
    Expr dl = nm.fresh("deadline", TypeTag::Real);
    nm.define(dl, arrow(lit_infinity(), ite(pre(pend), add(pre(lc), real(iv.high)), lit_infinity())));
    b.timeouts.push_back(dl.name());
  }
}

void condition_cons(Namer& nm, ObserverBundle& b, const WheneverEventCondition& p) {
  Expr lc = last_time(nm, "lc", p.cause);
  Expr hc = seen(nm, "hc", p.cause);
  b.restriction = ok_var(nm, implies(land(hc, within(p.window, sub(clock(), lc))), p.condition));
}

void sporadic_monitor(Namer& nm, ObserverBundle& b, const Sporadic& p) {
  const Rational& j = p.jitter;
  Expr hs = seen(nm, "hs", p.event);
  // Earliest nominal release consistent with the occurrences so far.
  Expr s = nm.fresh("s", TypeTag::Real);
  Expr first = minus(clock(), j);
  nm.define(s, ite(p.event, arrow(first, ite(pre(hs), max_of(plus(pre(s), p.iat), first), first)),
                   arrow(zero(), pre(s))));
  b.restriction = ok_var(
      nm, arrow(lit(true), implies(land(p.event, pre(hs)), le(minus(plus(pre(s), p.iat), j), clock()))));
}

void periodic_monitor(Namer& nm, ObserverBundle& b, const Periodic& p, bool timed) {
  const Rational& j = p.jitter;
  Expr np = nm.fresh("np", TypeTag::Real);
  Expr lo = nm.fresh("lo", TypeTag::Real);
  Expr hi = nm.fresh("hi", TypeTag::Real);
  Expr pnp = arrow(zero(), pre(np));
  Expr plo = arrow(zero(), pre(lo));
  Expr phi = arrow(real(p.period), pre(hi));
  Expr nominal = sub(clock(), pnp);
  nm.define(np, add(pnp, ite(p.event, real(p.period), zero())));
  nm.define(lo, ite(p.event, max_of(plo, minus(nominal, j)), plo));
  nm.define(hi, ite(p.event, min_of(phi, plus(nominal, j)), phi));
  b.restriction = ok_var(nm, land(le(lo, hi), le(minus(sub(clock(), np), j), hi)));
  if (timed) {
    Expr dl = nm.fresh("deadline", TypeTag::Real);
    nm.define(dl, arrow(real(p.period + j), plus(add(pre(hi), pre(np)), j)));
    b.timeouts.push_back(dl.name());
  }
}

// First step of each condition episode whose held duration lies in the
// condition window.
Expr episode_trigger(Namer& nm, const WhenConditionEvent& p) {
  const Expr& cond = p.condition;
  Expr st = nm.fresh("start", TypeTag::Real);
  Expr fired = nm.fresh("fired", TypeTag::Bool);
  Expr trig = nm.fresh("trigger", TypeTag::Bool);
  Expr fresh_episode = land(cond, arrow(lit(true), lnot(pre(cond))));
  nm.define(st, ite(fresh_episode, clock(), arrow(zero(), pre(st))));
  Expr already = arrow(lit(false), land(land(cond, pre(cond)), pre(fired)));
  nm.define(trig, land(land(cond, within(p.cond_window, sub(clock(), st))), lnot(already)));
  nm.define(fired, land(cond, lor(trig, already)));
  return trig;
}

}  // namespace

ObserverBundle compile_property_observer(const Pattern& pat, const SpecProgram& host, const std::string& prefix) {
  validate(pat);
  ObserverBundle b;
  b.mode = BundleMode::PropertyObserver;
  Namer nm(host, b, prefix);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent>) {
          response_observer(nm, b, p.cause, p.effect, p.window);
          if (p.exclusive) {
            // Exclusivity is a safety condition on the latest cause.
            Expr lc = last_time(nm, "lc", p.cause);
            Expr hc = seen(nm, "hc", p.cause);
            Expr excl = nm.fresh("excl", TypeTag::Bool);
            nm.define(excl, implies(p.effect, arrow(lit(false), land(pre(hc), within(p.window, sub(clock(), pre(lc)))))));
            b.property = land(*b.property, excl);
          }
        } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
          Expr run = nm.fresh("run", TypeTag::Bool);
          Expr timer = nm.fresh("timer", TypeTag::Real);
          Expr rec = nm.fresh("rec_c", TypeTag::Bool);
          Expr pass = nm.fresh("pass", TypeTag::Bool);
          nm.define(run, lor(rec, arrow(lit(false), pre(run))));
          nm.define(timer, arrow(zero(), ite(pre(run), add(pre(timer), sub(clock(), pre(clock()))), zero())));
          nm.restrict("rec_c_cause", implies(rec, p.cause));
          nm.define(pass, implies(land(run, within(p.window, timer)), p.condition));
          b.property = pass;
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          Expr trig = episode_trigger(nm, p);
          response_observer(nm, b, trig, p.effect, p.window);
        } else if constexpr (std::is_same_v<T, Always>) {
          b.property = p.condition;
        } else if constexpr (std::is_same_v<T, Periodic>) {
          periodic_monitor(nm, b, p, false);
          b.property = *b.restriction;
          b.restriction.reset();
        } else {
          sporadic_monitor(nm, b, p);
          b.property = *b.restriction;
          b.restriction.reset();
        }
      },
      pat);
  return b;
}

ObserverBundle compile_constraint(const Pattern& pat, const SpecProgram& host, const std::string& prefix) {
  validate(pat);
  ObserverBundle b;
  b.mode = BundleMode::Constraint;
  Namer nm(host, b, prefix);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent>) {
          whenever_cons(nm, b, p, host.timed());
        } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
          condition_cons(nm, b, p);
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          throw UnsupportedLowering("pattern '" + to_source(Pattern(p)) +
                                    "' is not supported in constraint position (when-holds-occurs)");
        } else if constexpr (std::is_same_v<T, Always>) {
          b.restriction = p.condition;
        } else if constexpr (std::is_same_v<T, Periodic>) {
          periodic_monitor(nm, b, p, host.timed());
        } else {
          sporadic_monitor(nm, b, p);
        }
      },
      pat);
  return b;
}

ObserverBundle compile_prop_side_condition(const WheneverEventEvent& p, const SpecProgram& host,
                                           const std::string& prefix) {
  validate(Pattern(p));
  ObserverBundle b;
  b.mode = BundleMode::PropSideCondition;
  Namer nm(host, b, prefix);
  const Interval& iv = p.window;
  Expr lc = last_time(nm, "lc", p.cause);
  Expr hc = seen(nm, "hc", p.cause);
  // An effect late enough after the latest earlier cause has been seen.
  Expr sn = nm.fresh("seen_e", TypeTag::Bool);
  Expr elapsed = sub(clock(), pre(lc));
  nm.define(sn, arrow(lit(false), lor(land(p.effect, above_low(iv, elapsed)), land(lnot(pre(p.cause)), pre(sn)))));
  Expr pass = nm.fresh("pass", TypeTag::Bool);
  nm.define(pass, arrow(lit(true), implies(land(land(p.cause, pre(hc)), below_high(iv, elapsed)), sn)));
  b.property = pass;
  return b;
}

void apply_bundle(SpecProgram& host, const ObserverBundle& b, const std::string& name) {
  for (const auto& v : b.fresh_vars) host.add_var(v.name, v.type);
  for (const auto& c : b.constraints) host.transition.push_back(c);
  if (b.mode == BundleMode::Constraint && b.restriction) host.transition.push_back({name, *b.restriction});
  for (const auto& t : b.timeouts) host.timeouts.push_back(t);
}

std::string to_source(const ObserverBundle& b) {
  std::ostringstream os;
  for (const auto& v : b.fresh_vars) os << "var " << v.name << " : " << to_string(v.type) << ";\n";
  if (!b.timeouts.empty()) {
    os << "timeout ";
    for (std::size_t i = 0; i < b.timeouts.size(); ++i) os << (i ? ", " : "") << b.timeouts[i];
    os << ";\n";
  }
  for (const auto& c : b.constraints) os << to_source(c.expr) << ";\n";
  if (b.restriction) os << to_source(*b.restriction) << ";\n";
  if (b.property) os << "property " << to_source(*b.property) << ";\n";
  return os.str();
}

std::string sanitize_name(const std::string& name) {
  std::string s;
  for (char ch : name) s += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.') ? ch : '_';
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = "p_" + s;
  return s;
}

ElaboratedProgram elaborate(const ProgramSource& src) {
  ElaboratedProgram out;
  out.program = src.program;
  out.kinds.assign(out.program.properties.size(), PropertyKind::Property);
  for (const auto& pc : src.patterns) {
    std::string prefix = sanitize_name(pc.name) + ".";
    if (pc.role == PatternRole::Constraint) {
      ObserverBundle b = compile_constraint(pc.pattern, out.program, prefix);
      apply_bundle(out.program, b, pc.name);
      if (const auto* w = std::get_if<WheneverEventEvent>(&pc.pattern)) {
        ObserverBundle s = compile_prop_side_condition(*w, out.program, prefix + "side.");
        apply_bundle(out.program, s, pc.name + ".side");
        out.program.properties.push_back({pc.name + ".side", *s.property});
        out.kinds.push_back(PropertyKind::SideCondition);
      }
    } else {
      ObserverBundle b = compile_property_observer(pc.pattern, out.program, prefix);
      apply_bundle(out.program, b, pc.name);
      out.program.properties.push_back({pc.name, *b.property});
      out.kinds.push_back(PropertyKind::Property);
    }
  }
  return out;
}

ElaboratedProgram load_program_text(std::string_view text) {
  SourceFile f = parse_source(text);
  if (f.system) throw Error("expected a flat program, found component declarations");
  ElaboratedProgram ep = elaborate(f.program);
  type_check(ep.program);
  return ep;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rtc
