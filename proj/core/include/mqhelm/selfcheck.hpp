#pragma once

#include "mqhelm/kernel.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mqhelm::selfcheck {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// Invariant suites across all modules: kernel calculus against finite
// differences, complete monotonicity, CPD(1), GKB identities, filter-factor
// bounds and the oracle equivalences between the projected and full-space
// solvers. `full` runs acceptance-scale sizes, otherwise a fast subset.
ValidationReport run_selfchecks(bool full);

// Kernel Laplacian vs a 7-point finite-difference Laplacian of mq_value;
// the Laplacian under test is injectable so the check itself is testable.
CheckResult check_kernel_laplacian_fd(
    int n_points,
    const std::function<double(double, const KernelParams&)>& laplacian = {});

}  // namespace mqhelm::selfcheck
