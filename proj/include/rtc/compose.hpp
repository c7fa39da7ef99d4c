#pragma once

#include <map>
#include <string>
#include <vector>

#include "rtc/source.hpp"

namespace rtc {

enum class ObligationKind { AssumptionDischarge, GuaranteeCheck, TopInvariant, LeafContract };

std::string_view to_string(ObligationKind k);

/// Which hypotheses an assumption obligation may use.
enum class AssumptionRule {
  Strong,   // hist(S_a) only
  Weak,     // plus Z(H(w_g)) for all w and H(v_g) for all v != c; unsound under cycles
  Ordered,  // plus Z(H(w_g)) for all w and H(v_g) for v before c
};

struct Obligation {
  std::string name;
  ObligationKind kind = ObligationKind::LeafContract;
  int formula = 1;
  std::string component;  // component type the obligation belongs to
  SpecProgram program;
  Expr property;
};

struct ComposeOptions {
  AssumptionRule rule = AssumptionRule::Ordered;
  /// Subcomponent order per component type; declaration order otherwise.
  std::map<std::string, std::vector<std::string>> order;
};

/// Subcomponent instance names in declaration order, or `permutation` after
/// checking it names each instance exactly once.
std::vector<std::string> order_components(const ComponentDef& sys, const std::vector<std::string>& permutation = {});

/// One obligation per subcomponent assumption, over the contracts-only
/// composition of `sys`.
std::vector<Obligation> gen_assumption_obligations(const SystemModel& m, const ComponentDef& sys,
                                                   const ComposeOptions& opts = {});

/// hist(S_a) and the historical subcomponent guarantees entail S_g.
Obligation gen_guarantee_obligation(const SystemModel& m, const ComponentDef& sys);

/// hist(c_a) => c_g over the implementation, then one obligation per property
/// the implementation itself declares (including pattern side conditions).
std::vector<Obligation> gen_leaf_obligations(const ComponentDef& c);

/// Every obligation of the hierarchy below the top system, each component
/// type visited once, depth first in declaration order.
std::vector<Obligation> generate_obligations(const SystemModel& m, const ComposeOptions& opts = {});

/// All implementations wired together, subcomponent variables prefixed by
/// their instance path. The single property is hist(S_a) => S_g of the top.
SpecProgram compose_monolithic(const SystemModel& m);

}  // namespace rtc
