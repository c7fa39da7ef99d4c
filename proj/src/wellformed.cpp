#include "rtc/wellformed.hpp"

namespace rtc {

namespace {

void walk(const Expr& e, bool guarded, std::vector<std::size_t>& path,
          std::optional<WellFormedViolation>& best) {
  bool child_guard = guarded;
  if (e.op() == Op::Pre) {
    if (!guarded && (!best || path.size() >= best->path.size())) best = WellFormedViolation{path, e};
    child_guard = false;
  } else if (e.op() == Op::Initz) {
    child_guard = false;
  }
  for (std::size_t i = 0; i < e.args().size(); ++i) {
    bool g = child_guard;
    if (e.op() == Op::Arrow) g = (i == 1) ? true : guarded;
    path.push_back(i);
    walk(e.arg(i), g, path, best);
    path.pop_back();
  }
}

}  // namespace

std::optional<WellFormedViolation> check_well_formed(const Expr& e) {
  std::optional<WellFormedViolation> best;
  std::vector<std::size_t> path;
  walk(e, false, path, best);
  return best;
}

}  // namespace rtc
