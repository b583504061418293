// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "gsiplab/global_opt.hpp"

namespace gsiplab {

/// Outcome of checking a branch-and-bound result against the grid oracle.
struct OracleComparison {
  MinimizeOutcome grid;
  /// |bb value - grid value| when both are optimal, else 0.
  double discrepancy = 0.0;
  /// tol_opt + L * mesh * sqrt(dim), with L the sampled Lipschitz constant of
  /// the objective.
  double allowance = 0.0;
  /// The mismatch is explained by a feasible region thinner than the mesh.
  bool sliver = false;
  /// A grid point beat the certified lower bound.
  bool soundness_violation = false;
  bool agree = false;
};

/// Cross-checks a branch-and-bound outcome for `inst` against grid_minimize.
///
/// Values must agree within the allowance. A disagreement is excused as a
/// sliver when relaxing the constraints by their sampled Lipschitz constant
/// times the mesh lets the grid reach the branch-and-bound value, i.e. the
/// feasible set near the optimum falls between grid points.
inline OracleComparison compare_with_grid(const MinimizationInstance& inst, const MinimizeOutcome& bb,
                                          std::size_t points_per_axis, double tol_opt, double tol_feas) {
  OracleComparison cmp;
  cmp.grid = grid_minimize(inst, points_per_axis, tol_feas);
  const double reach = grid_mesh(inst.box, points_per_axis) * std::sqrt(static_cast<double>(inst.box.size()));
  cmp.allowance = tol_opt + sampled_lipschitz(inst.objective, inst.box, points_per_axis) * reach;

  auto sliver_explains = [&] {
    if (inst.constraints.empty() || !bb.optimal()) return false;
    double constraint_lipschitz = 0.0;
    for (const auto& c : inst.constraints)
      constraint_lipschitz = std::max(constraint_lipschitz, sampled_lipschitz(c.expr, inst.box, points_per_axis));
    const MinimizeOutcome relaxed =
        grid_minimize(inst, points_per_axis, tol_feas + constraint_lipschitz * reach);
    return relaxed.optimal() && relaxed.value() <= bb.value() + cmp.allowance;
  };

  if (bb.optimal() && cmp.grid.optimal()) {
    cmp.discrepancy = std::abs(bb.value() - cmp.grid.value());
    const double slack = 1e-12 * (1.0 + std::abs(cmp.grid.value()));
    cmp.soundness_violation = cmp.grid.value() < bb.value_bounds->lo - slack;
    cmp.agree = !cmp.soundness_violation && cmp.discrepancy <= cmp.allowance;
    if (!cmp.agree && !cmp.soundness_violation && sliver_explains()) cmp.sliver = cmp.agree = true;
  } else if (bb.optimal()) {
    cmp.sliver = cmp.agree = sliver_explains();
  } else {
    cmp.agree = !cmp.grid.optimal();
  }
  return cmp;
}

}  // namespace gsiplab
