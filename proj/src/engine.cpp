#include "rtc/engine.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <future>
#include <thread>

#include "rtc/semantics.hpp"
#include "rtc/smt.hpp"

namespace rtc {

std::string_view to_string(EngineKind k) {
  switch (k) {
    case EngineKind::Explicit: return "explicit";
    case EngineKind::Bmc: return "bmc";
    case EngineKind::KInduction: return "kind";
  }
  return "?";
}

std::optional<EngineKind> engine_from_string(std::string_view s) {
  if (s == "explicit") return EngineKind::Explicit;
  if (s == "bmc") return EngineKind::Bmc;
  if (s == "kind" || s == "k-induction") return EngineKind::KInduction;
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "proved";
    case Verdict::Falsified: return "falsified";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool holds_at(const Expr& prop, const TimedTrace& tr, std::size_t i) {
  try {
    return eval_bool(prop, tr, i);
  } catch (const EvalError&) {
    return false;
  }
}

class SmtRun {
 public:
  SmtRun(const SpecProgram& p, const Expr& prop, const EngineConfig& cfg)
      : p_(p), prop_(prop), cfg_(cfg), enc_(p, cfg.restrict_domain ? &cfg.domain : nullptr) {
    if (cfg.solver.path.empty()) throw SolverError("no SMT solver configured (use --solver or set RTC_SOLVER)");
  }

  SolverAnswer ask(const SmtQuery& q) { return run_solver(cfg_.solver, enc_.script(prop_, q)); }

  // Violation exactly at depth n with the property holding before.
  SolverAnswer base(std::size_t n) {
    SmtQuery q;
    q.length = n;
    return ask(q);
  }

  SolverAnswer step(std::size_t n, const std::vector<Expr>& invariants) {
    SmtQuery q;
    q.length = n + 1;
    q.from_initial = false;
    q.invariants = invariants;
    return ask(q);
  }

  void falsified(CheckResult& r, const SolverAnswer& a, std::size_t n) {
    TimedTrace tr = decode_counterexample(a.model, p_, prop_, n);
    r.verdict = Verdict::Falsified;
    r.bound = n;
    r.fail_step = n;
    r.counterexample = std::move(tr);
  }

 private:
  const SpecProgram& p_;
  const Expr& prop_;
  const EngineConfig& cfg_;
  SmtEncoder enc_;
};

void add_note(CheckResult& r, const std::string& s) {
  if (!r.diagnostics.empty()) r.diagnostics += "; ";
  r.diagnostics += s;
}

CheckResult run_bmc(const SpecProgram& p, const Expr& prop, const EngineConfig& cfg) {
  CheckResult r;
  r.engine = "bmc";
  SmtRun smt(p, prop, cfg);
  for (std::size_t n = 1; n <= cfg.k; ++n) {
    SolverAnswer a = smt.base(n);
    if (a.result == SatResult::Sat) {
      smt.falsified(r, a, n);
      return r;
    }
    if (a.result == SatResult::Unknown) {
      r.verdict = Verdict::Unknown;
      r.bound = n - 1;
      add_note(r, "solver returned unknown at depth " + std::to_string(n) + ": " + a.diagnostics);
      return r;
    }
  }
  r.verdict = Verdict::Proved;
  r.bound = cfg.k;
  r.bounded = true;
  return r;
}

CheckResult run_kind(const SpecProgram& p, const Expr& prop, const EngineConfig& cfg,
                     const std::vector<Expr>& invariants) {
  CheckResult r;
  r.engine = "kind";
  SmtRun smt(p, prop, cfg);
  for (std::size_t n = 1; n <= cfg.k; ++n) {
    SolverAnswer b = smt.base(n);
    if (b.result == SatResult::Sat) {
      smt.falsified(r, b, n);
      return r;
    }
    if (b.result == SatResult::Unknown) {
      r.verdict = Verdict::Unknown;
      r.bound = n - 1;
      add_note(r, "solver returned unknown in base case " + std::to_string(n) + ": " + b.diagnostics);
      return r;
    }
    SolverAnswer s = smt.step(n, invariants);
    if (s.result == SatResult::Unsat) {
      r.verdict = Verdict::Proved;
      r.bound = n;
      return r;
    }
    if (s.result == SatResult::Unknown) add_note(r, "solver returned unknown in step case " + std::to_string(n));
  }
  r.verdict = Verdict::Unknown;
  r.bound = cfg.k;
  add_note(r, "no counterexample up to depth " + std::to_string(cfg.k) + ", but induction did not close");
  return r;
}

}  // namespace

CheckResult check_invariant_explicit(const SpecProgram& p, const Expr& prop, const EnumerationDomain& dom) {
  auto t0 = Clock::now();
  CheckResult r;
  r.engine = "explicit";
  TraceEnumerator en(p, dom);
  std::optional<TimedTrace> cex;
  en.run([&](const TimedTrace& tr) {
    if (holds_at(prop, tr, tr.length())) return true;
    if (!cex || tr.length() < cex->length()) {
      cex = tr;
      en.limit() = tr.length() - 1;
    }
    return tr.length() > 1;
  });
  if (cex) {
    r.verdict = Verdict::Falsified;
    r.bound = cex->length();
    r.fail_step = cex->length();
    r.counterexample = std::move(cex);
  } else {
    r.verdict = Verdict::Proved;
    r.bound = dom.horizon;
    r.bounded = true;
  }
  r.diagnostics = std::to_string(en.visited()) + " prefixes enumerated";
  r.seconds = since(t0);
  return r;
}

TimedTrace decode_counterexample(const SmtModel& model, const SpecProgram& p, const Expr& prop, std::size_t length) {
  TimedTrace tr = SmtEncoder(p).decode(model, length);
  if (auto v = trace_admissible(p, tr))
    throw Error("internal error: decoded counterexample violates '" + v->constraint + "' at step " +
                std::to_string(v->step) + " (" + v->detail + "): " + trace_to_json(tr));
  if (holds_at(prop, tr, length))
    throw Error("internal error: decoded counterexample satisfies the property at its last step: " + trace_to_json(tr));
  return tr;
}

CheckResult check_lemmas(const SpecProgram& p, const EngineConfig& cfg) {
  auto t0 = Clock::now();
  std::vector<Expr> parts;
  for (const auto& l : p.lemmas) parts.push_back(l.expr);
  SpecProgram bare = p;
  bare.lemmas.clear();
  CheckResult r = run_kind(bare, conjunction(parts), cfg, {});
  r.engine = "kind-lemmas";
  if (r.verdict == Verdict::Falsified) {
    for (const auto& l : p.lemmas)
      if (!holds_at(l.expr, *r.counterexample, r.counterexample->length())) {
        add_note(r, "lemma '" + l.name + "' is falsified");
        break;
      }
  } else if (r.verdict == Verdict::Unknown) {
    add_note(r, "lemmas are not inductive up to depth " + std::to_string(cfg.k));
  }
  r.seconds = since(t0);
  return r;
}

CheckResult run_engine(const SpecProgram& p, const Expr& prop, const EngineConfig& cfg) {
  auto t0 = Clock::now();
  CheckResult r;
  switch (cfg.kind) {
    case EngineKind::Explicit: return check_invariant_explicit(p, prop, cfg.domain);
    case EngineKind::Bmc: r = run_bmc(p, prop, cfg); break;
    case EngineKind::KInduction: {
      std::vector<Expr> invariants;
      std::string note;
      if (!p.lemmas.empty()) {
        bool ok = cfg.lemmas_proved;
        if (!ok) {
          CheckResult lr = check_lemmas(p, cfg);
          ok = lr.verdict == Verdict::Proved;
          if (!ok) note = "lemmas not used: " + lr.diagnostics;
        }
        if (ok)
          for (const auto& l : p.lemmas) invariants.push_back(l.expr);
      }
      r = run_kind(p, prop, cfg, invariants);
      if (!note.empty()) add_note(r, note);
      break;
    }
  }
  r.seconds = since(t0);
  return r;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned t = 0; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<CheckResult> discharge_all(const std::vector<Task>& tasks, const EngineConfig& cfg, unsigned threads) {
  std::vector<CheckResult> results(tasks.size());
  parallel_for(tasks.size(), threads,
               [&](std::size_t i) { results[i] = run_engine(tasks[i].program, tasks[i].property, cfg); });
  return results;
}

}  // namespace rtc
