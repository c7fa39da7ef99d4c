#pragma once

#include <optional>
#include <vector>

#include "rtc/expr.hpp"

namespace rtc {

/// Location of an offending `pre`: child indices from the root.
struct WellFormedViolation {
  std::vector<std::size_t> path;
  Expr subexpr;
};

/// Accepts iff every `pre` sits in the right-hand side of an enclosing `->`
/// and consecutive nested `pre`s are separated by another `->`. `initz(e)`
/// behaves like `true -> pre(e)`. Returns the innermost violation.
std::optional<WellFormedViolation> check_well_formed(const Expr& e);

}  // namespace rtc
