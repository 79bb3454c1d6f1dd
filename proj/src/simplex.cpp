#include "kslab/simplex.hpp"

#include <limits>

#include "kslab/errors.hpp"

namespace kslab::lp {

FeasibilityResult find_feasible_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      const FeasibilityOptions& opts) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw InputError("LP right-hand side length does not match constraint rows");
  if (!a.allFinite() || !b.allFinite()) throw InputError("LP data must be finite");

  // Tableau columns: n structural, m artificial, then rhs. Row m holds the
  // phase-one reduced costs.
  const Eigen::Index rhs = n + m;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, rhs) = sign * b(i);
    basis[static_cast<std::size_t>(i)] = n + i;
  }
  for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;

  FeasibilityResult result;
  while (true) {
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -opts.pivot_tolerance) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;

    Eigen::Index leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double coef = t(i, entering);
      if (coef <= opts.pivot_tolerance) continue;
      const double ratio = t(i, rhs) / coef;
      const auto bi = basis[static_cast<std::size_t>(i)];
      if (ratio < best_ratio - opts.pivot_tolerance ||
          (ratio <= best_ratio + opts.pivot_tolerance && leaving >= 0 &&
           bi < basis[static_cast<std::size_t>(leaving)])) {
        best_ratio = ratio;
        leaving = i;
      }
    }
    // Phase one is bounded below by zero, so an unbounded column cannot occur
    // unless the reduced costs are corrupted.
    if (leaving < 0) throw InvariantError("phase-one simplex reported an unbounded direction");

    t.row(leaving) /= t(leaving, entering);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leaving) continue;
      const double f = t(i, entering);
      if (f != 0.0) t.row(i) -= f * t.row(leaving);
    }
    basis[static_cast<std::size_t>(leaving)] = entering;
    if (++result.pivots > opts.max_pivots) throw InvariantError("simplex pivot limit exceeded");
  }

  result.infeasibility = -t(m, rhs);
  result.feasible = result.infeasibility <= opts.feasibility_tolerance;
  if (result.feasible) {
    result.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto bi = basis[static_cast<std::size_t>(i)];
      if (bi < n) result.x(bi) = std::max(t(i, rhs), 0.0);
    }
  }
  return result;
}

}  // namespace kslab::lp
