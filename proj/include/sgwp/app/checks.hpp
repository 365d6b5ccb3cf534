#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgwp/field_model.hpp"
#include "sgwp/types.hpp"

namespace sgwp::app {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

using PacketRhs = std::function<State(const State&, const FieldModel<double>&, double)>;

/// Replacement parts for mutation testing of the check suite itself.
struct CheckHooks {
  PacketRhs semiclassical;              ///< defaults to semiclassical_rhs
  FieldPtr<double> noether_model;       ///< defaults to quartic_rotational_2d
};

/// Fast invariant suite: FD cross-checks, bracket consistency, exactness
/// regime, conservation of H_hbar and J_hbar, Wigner moments, Laplace order.
std::vector<CheckResult> run_checks(const CheckHooks& hooks = {});

}  // namespace sgwp::app
