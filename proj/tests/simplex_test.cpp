#include "kslab/simplex.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using kslab::lp::find_feasible_point;

namespace {

// Brute-force oracle: {x >= 0, Ax = b} is non-empty iff some basic solution
// on a column subset of size rank(A) is non-negative.
bool vertex_enumeration_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    Eigen::VectorXd y = cols.empty() ? Eigen::VectorXd() : Eigen::VectorXd(sub.completeOrthogonalDecomposition().solve(b));
    const double residual = cols.empty() ? b.norm() : (sub * y - b).norm();
    if (residual < 1e-9 && (cols.empty() || y.minCoeff() >= -1e-9)) return true;
  }
  return false;
}

}  // namespace

TEST(Simplex, TrivialFeasible) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  Eigen::VectorXd b(1);
  b << 1;
  const auto r = find_feasible_point(a, b);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.x.sum(), 1.0, 1e-12);
  EXPECT_GE(r.x.minCoeff(), 0.0);
}

TEST(Simplex, TrivialInfeasible) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  Eigen::VectorXd b(1);
  b << -1;
  const auto r = find_feasible_point(a, b);
  EXPECT_FALSE(r.feasible);
  EXPECT_NEAR(r.infeasibility, 1.0, 1e-12);
}

TEST(Simplex, NegativeRightHandSideHandled) {
  Eigen::MatrixXd a(2, 3);
  a << 1, -1, 0, 0, 1, 1;
  Eigen::VectorXd b(2);
  b << -0.5, 1.0;
  const auto r = find_feasible_point(a, b);
  ASSERT_TRUE(r.feasible);
  EXPECT_LT((a * r.x - b).norm(), 1e-10);
  EXPECT_GE(r.x.minCoeff(), -1e-12);
}

TEST(Simplex, RedundantRowsAreTolerated) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 1, 2, 2, 2, 1, 0, -1;
  Eigen::VectorXd b(3);
  b << 1, 2, 0;
  const auto r = find_feasible_point(a, b);
  ASSERT_TRUE(r.feasible);
  EXPECT_LT((a * r.x - b).norm(), 1e-10);
}

TEST(Simplex, AgreesWithVertexEnumeration) {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> small(-1, 1);
  int feasible_count = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = 1 + t % 3;
    const int n = 3 + t % 4;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    // integer entries make degenerate and rank-deficient cases common
    const bool integral = t % 2 == 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = integral ? small(rng) : u(rng);
      b(i) = integral ? small(rng) : u(rng);
    }
    const bool oracle = vertex_enumeration_feasible(a, b);
    const auto r = find_feasible_point(a, b);
    ASSERT_EQ(r.feasible, oracle) << "case " << t << "\nA=\n" << a << "\nb=" << b.transpose();
    if (r.feasible) {
      ++feasible_count;
      EXPECT_LT((a * r.x - b).norm(), 1e-9);
      EXPECT_GE(r.x.minCoeff(), -1e-12);
    }
  }
  EXPECT_GT(feasible_count, 100);
  EXPECT_LT(feasible_count, 900);
}

TEST(Simplex, DeterministicPivotSequence) {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(4, 9);
  Eigen::VectorXd b(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 9; ++j) a(i, j) = u(rng);
    b(i) = u(rng);
  }
  const auto r1 = find_feasible_point(a, b);
  const auto r2 = find_feasible_point(a, b);
  EXPECT_EQ(r1.feasible, r2.feasible);
  EXPECT_EQ(r1.pivots, r2.pivots);
  if (r1.feasible) EXPECT_EQ(r1.x, r2.x);
}
