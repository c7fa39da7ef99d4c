#include "rtc/membership.hpp"

#include <algorithm>

#include "rtc/semantics.hpp"

namespace rtc {

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::In: return "in";
    case Membership::InPending: return "in-pending";
    case Membership::Out: return "out";
  }
  return "?";
}

namespace {

std::vector<bool> holds(const Expr& e, const TimedTrace& tr) {
  std::vector<bool> v(tr.length() + 1, false);
  for (std::size_t i = 1; i <= tr.length(); ++i) v[i] = eval_bool(e, tr, i);
  return v;
}

// Combines per-cause outcomes: the first Out wins, otherwise any pending cause
// makes the whole trace pending.
struct Tally {
  MembershipResult res;
  void add(Membership m, std::size_t i) {
    if (res.verdict == Membership::Out) return;
    if (m == Membership::Out) res = MembershipResult::out(i);
    else if (m == Membership::InPending) res.verdict = Membership::InPending;
  }
};

// Outcome for a cause at i given a discharge predicate on later steps.
template <class Discharges>
Membership obligation(const Interval& iv, const TimedTrace& tr, std::size_t i, Discharges&& discharges) {
  const Rational& ti = tr.time(i);
  for (std::size_t j = i + 1; j <= tr.length(); ++j) {
    Rational d = tr.time(j) - ti;
    if (discharges(j, d)) return Membership::In;
    if (!iv.below_high(d)) return Membership::Out;
  }
  return Membership::InPending;
}

MembershipResult exclusivity(const WheneverEventEvent& pat, const std::vector<bool>& c, const std::vector<bool>& e,
                             const TimedTrace& tr) {
  std::optional<std::size_t> last;
  for (std::size_t j = 1; j <= tr.length(); ++j) {
    if (e[j] && (!last || !pat.window.contains(tr.time(j) - tr.time(*last)))) return MembershipResult::out(j);
    if (c[j]) last = j;
  }
  return {};
}

MembershipResult patt_on(const std::vector<bool>& c, const std::vector<bool>& e, const Interval& iv,
                         const TimedTrace& tr) {
  Tally t;
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!c[i]) continue;
    t.add(obligation(iv, tr, i, [&](std::size_t j, const Rational& d) { return e[j] && iv.contains(d); }), i);
  }
  return t.res;
}

// Bellman-Ford feasibility of nominal release times s_k with
// s_{k+1} - s_k >= iat and |t_k - s_k| <= jitter.
bool sporadic_feasible(const std::vector<Rational>& times, const Rational& iat, const Rational& jitter) {
  std::size_t n = times.size();
  if (n == 0) return true;
  struct Edge {
    std::size_t from, to;
    Rational w;
  };
  // Node n is the zero reference; constraint x_to - x_from <= w.
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < n; ++k) {
    edges.push_back({n, k, times[k] + jitter});
    edges.push_back({k, n, -(times[k] - jitter)});
    if (k + 1 < n) edges.push_back({k + 1, k, -iat});
  }
  std::vector<Rational> dist(n + 1, Rational(0));
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (const auto& ed : edges) {
      Rational cand = dist[ed.from] + ed.w;
      if (cand < dist[ed.to]) {
        dist[ed.to] = cand;
        changed = true;
      }
    }
    if (!changed) return true;
  }
  return false;
}

MembershipResult sporadic(const Sporadic& pat, const TimedTrace& tr) {
  if (pat.jitter == 0) return membership_min_separation(pat.event, pat.iat, tr);
  auto e = holds(pat.event, tr);
  std::vector<Rational> times;
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!e[i]) continue;
    times.push_back(tr.time(i));
    if (!sporadic_feasible(times, pat.iat, pat.jitter)) return MembershipResult::out(i);
  }
  return {};
}

// Anchor a in [0, P]; the k-th occurrence lies within jitter of a + kP, and
// no step passes the latest admissible time of a missing occurrence.
bool periodic_feasible(const Periodic& pat, const std::vector<bool>& e, const TimedTrace& tr, std::size_t upto) {
  Rational lo = 0, hi = pat.period;
  std::size_t count = 0;
  for (std::size_t i = 1; i <= upto; ++i) {
    const Rational& ti = tr.time(i);
    if (e[i]) {
      Rational nominal = ti - Rational(static_cast<long>(count)) * pat.period;
      lo = std::max(lo, Rational(nominal - pat.jitter));
      hi = std::min(hi, Rational(nominal + pat.jitter));
      ++count;
    }
    lo = std::max(lo, Rational(ti - Rational(static_cast<long>(count)) * pat.period - pat.jitter));
  }
  return lo <= hi;
}

MembershipResult periodic(const Periodic& pat, const TimedTrace& tr) {
  auto e = holds(pat.event, tr);
  for (std::size_t m = 1; m <= tr.length(); ++m)
    if (!periodic_feasible(pat, e, tr, m)) return MembershipResult::out(m);
  return {};
}

MembershipResult condition_window(const WheneverEventCondition& pat, const TimedTrace& tr) {
  auto c = holds(pat.cause, tr);
  auto cond = holds(pat.condition, tr);
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!c[i]) continue;
    for (std::size_t j = i; j <= tr.length(); ++j)
      if (pat.window.contains(tr.time(j) - tr.time(i)) && !cond[j]) return MembershipResult::out(i);
  }
  return {};
}

// Trigger: the first step of a condition episode whose held duration lies in
// the condition window.
std::vector<bool> episode_triggers(const WhenConditionEvent& pat, const TimedTrace& tr) {
  auto cond = holds(pat.condition, tr);
  std::vector<bool> trig(tr.length() + 1, false);
  Rational start;
  bool fired = false;
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!cond[i]) continue;
    if (i == 1 || !cond[i - 1]) {
      start = tr.time(i);
      fired = false;
    }
    if (!fired && pat.cond_window.contains(tr.time(i) - start)) {
      trig[i] = true;
      fired = true;
    }
  }
  return trig;
}

}  // namespace

MembershipResult membership_patt(const WheneverEventEvent& pat, const TimedTrace& tr) {
  auto c = holds(pat.cause, tr);
  auto e = holds(pat.effect, tr);
  MembershipResult r = patt_on(c, e, pat.window, tr);
  if (pat.exclusive && r.in()) {
    MembershipResult x = exclusivity(pat, c, e, tr);
    if (!x.in()) return x;
  }
  return r;
}

MembershipResult membership_cons(const WheneverEventEvent& pat, const TimedTrace& tr) {
  auto c = holds(pat.cause, tr);
  auto e = holds(pat.effect, tr);
  const Interval& iv = pat.window;
  Tally t;
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!c[i]) continue;
    t.add(obligation(iv, tr, i,
                     [&](std::size_t j, const Rational& d) {
                       return (e[j] && iv.contains(d)) || (c[j] && iv.below_high(d));
                     }),
          i);
  }
  if (pat.exclusive && t.res.in()) {
    MembershipResult x = exclusivity(pat, c, e, tr);
    if (!x.in()) return x;
  }
  return t.res;
}

MembershipResult membership_prop(const WheneverEventEvent& pat, const TimedTrace& tr) {
  auto c = holds(pat.cause, tr);
  auto e = holds(pat.effect, tr);
  const Interval& iv = pat.window;
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!c[i]) continue;
    const Rational& ti = tr.time(i);
    for (std::size_t j = i + 1; j <= tr.length(); ++j) {
      if (!c[j] || !iv.below_high(tr.time(j) - ti)) continue;
      bool found = false;
      for (std::size_t k = i + 1; k <= j && !found; ++k) found = e[k] && iv.above_low(tr.time(k) - ti);
      if (!found) return MembershipResult::out(i);
    }
  }
  return {};
}

MembershipResult membership_min_separation(const Expr& ev, const Rational& iat, const TimedTrace& tr) {
  auto e = holds(ev, tr);
  for (std::size_t i = 1; i <= tr.length(); ++i) {
    if (!e[i]) continue;
    for (std::size_t j = i + 1; j <= tr.length(); ++j)
      if (tr.time(j) < tr.time(i) + iat && e[j]) return MembershipResult::out(i);
  }
  return {};
}

PropCons membership_prop_cons(const WheneverEventEvent& pat, const TimedTrace& tr) {
  return {membership_prop(pat, tr), membership_cons(pat, tr)};
}

MembershipResult pattern_membership(const Pattern& pat, const TimedTrace& tr) {
  return std::visit(
      [&](const auto& p) -> MembershipResult {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, WheneverEventEvent>) {
          return membership_patt(p, tr);
        } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
          return condition_window(p, tr);
        } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
          auto trig = episode_triggers(p, tr);
          return patt_on(trig, holds(p.effect, tr), p.window, tr);
        } else if constexpr (std::is_same_v<T, Always>) {
          for (std::size_t i = 1; i <= tr.length(); ++i)
            if (!eval_bool(p.condition, tr, i)) return MembershipResult::out(i);
          return {};
        } else if constexpr (std::is_same_v<T, Periodic>) {
          return periodic(p, tr);
        } else {
          return sporadic(p, tr);
        }
      },
      pat);
}

}  // namespace rtc
