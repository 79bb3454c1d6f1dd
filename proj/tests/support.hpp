#pragma once

// Random generators and hand-written oracles shared by the test binaries.
// Nothing here calls into the library's trace/expectation code paths.

#include <cmath>
#include <random>
#include <vector>

#include "kslab/qstate.hpp"

namespace kslab::testing {

using Rng = std::mt19937_64;

inline Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Vec3 random_in_ball(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::cbrt(u(rng)) * random_unit(rng);
}

// Ginibre-type random density matrix of random rank 1..4.
inline TwoQubitState random_density(Rng& rng) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> rank_dist(1, 4);
  const int rank = rank_dist(rng);
  Eigen::MatrixXcd m(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix4 rho = m * m.adjoint();
  rho /= rho.trace().real();
  return TwoQubitState(rho);
}

inline PureState random_pure(Rng& rng) {
  std::normal_distribution<double> g;
  Vector4 v;
  for (int i = 0; i < 4; ++i) v(i) = Complex(g(rng), g(rng));
  return PureState(v / v.norm());
}

inline ProductEnsemble random_ensemble(Rng& rng, int max_terms = 6, bool pure = true) {
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = count(rng);
  std::vector<ProductTerm> terms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = u(rng) + 1e-3;
    total += w;
    terms.push_back({w, pure ? random_unit(rng) : random_in_ball(rng), pure ? random_unit(rng) : random_in_ball(rng)});
  }
  for (auto& t : terms) t.weight /= total;
  // renormalize the rounding away
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) s += terms[i].weight;
  terms.back().weight = 1.0 - s;
  return ProductEnsemble(std::move(terms));
}

// Bell fidelities as full quadratic forms <B|rho|B> over explicit vectors.
struct FidelityOracle {
  double phi_plus, phi_minus, psi_plus, psi_minus;
};
inline FidelityOracle fidelity_oracle(const Matrix4& r) {
  const double h = 1.0 / std::sqrt(2.0);
  const auto quad = [&](const Vector4& v) { return (v.adjoint() * r * v)(0).real(); };
  return {quad(Vector4(h, 0, 0, h)), quad(Vector4(h, 0, 0, -h)), quad(Vector4(0, h, h, 0)),
          quad(Vector4(0, h, -h, 0))};
}

// Expectation of (a.sigma)(x)(b.sigma) by explicit index sum
// E = sum_{i,j,k,l} rho[(i j),(k l)] A[k][i] B[l][j].
inline double correlator_oracle(const Matrix4& rho, const Vec3& a, const Vec3& b) {
  const auto obs = [](const Vec3& n) {
    // [[z, x - iy], [x + iy, -z]]
    std::array<std::array<Complex, 2>, 2> m{};
    m[0][0] = n.z();
    m[0][1] = Complex(n.x(), -n.y());
    m[1][0] = Complex(n.x(), n.y());
    m[1][1] = -n.z();
    return m;
  };
  const auto A = obs(a);
  const auto B = obs(b);
  Complex sum = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) sum += rho(2 * i + j, 2 * k + l) * A[k][i] * B[l][j];
  return sum.real();
}

}  // namespace kslab::testing
