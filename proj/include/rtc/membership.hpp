#pragma once

#include <optional>
#include <string>

#include "rtc/pattern.hpp"
#include "rtc/trace.hpp"

namespace rtc {

// Direct evaluation of the trace-set definitions on a finite trace. These are
// the reference oracles that every lowering is measured against.

enum class Membership {
  In,
  // An obligation is still open at the end of the trace and its window has
  // not yet been passed. Treated as `In`.
  InPending,
  Out,
};

struct MembershipResult {
  Membership verdict = Membership::In;
  std::optional<std::size_t> witness;  // 1-based step of the offending cause

  bool in() const { return verdict != Membership::Out; }
  static MembershipResult out(std::size_t step) { return {Membership::Out, step}; }
};

std::string_view to_string(Membership m);

/// Membership in the pattern's trace set. For WheneverEventEvent this is
/// L_patt (plus the exclusivity condition when the flag is set).
MembershipResult pattern_membership(const Pattern& pat, const TimedTrace& tr);

struct PropCons {
  MembershipResult prop;
  MembershipResult cons;
};

/// The non-overlap side condition L_prop and the constraint set L_cons.
PropCons membership_prop_cons(const WheneverEventEvent& pat, const TimedTrace& tr);

// Individual definitions, exposed for tests.
MembershipResult membership_patt(const WheneverEventEvent& pat, const TimedTrace& tr);
MembershipResult membership_cons(const WheneverEventEvent& pat, const TimedTrace& tr);
MembershipResult membership_prop(const WheneverEventEvent& pat, const TimedTrace& tr);
/// Occurrences of `e` are at least `iat` apart (jitter-free sporadic).
MembershipResult membership_min_separation(const Expr& e, const Rational& iat, const TimedTrace& tr);

}  // namespace rtc
