#pragma once

// Small dense LP feasibility: find x >= 0 with A x = b.
//
// Two-phase simplex restricted to phase one (artificial variables, minimise
// their sum) with Bland's smallest-index rule, so the pivot sequence and the
// returned vertex are fully determined by the input.

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace kslab::lp {

struct FeasibilityOptions {
  double pivot_tolerance = 1e-12;
  // Phase-one objective below this counts as feasible.
  double feasibility_tolerance = 1e-9;
  int max_pivots = 10000;
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd x;    // basic feasible point when feasible
  double infeasibility = 0.0;  // optimal sum of artificials
  int pivots = 0;
};

FeasibilityResult find_feasible_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      const FeasibilityOptions& opts = {});

}  // namespace kslab::lp
