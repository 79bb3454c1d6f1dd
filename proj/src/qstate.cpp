#include "kslab/qstate.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus: return "phiPlus";
    case BellLabel::PhiMinus: return "phiMinus";
    case BellLabel::PsiPlus: return "psiPlus";
    case BellLabel::PsiMinus: return "psiMinus";
  }
  return "unknown";
}

PureState::PureState(const Vector4& amplitudes) : amplitudes_(amplitudes) {
  const double norm = amplitudes_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol::kConstruction) {
    throw InputError("pure state is not normalized: norm = " + fmt_double(norm));
  }
}

TwoQubitState::TwoQubitState(const Matrix4& matrix) {
  if (!matrix.allFinite()) throw InputError("density matrix has non-finite entries");
  const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::kConstruction) {
    throw InputError("density matrix is not hermitian: max |M - M^dagger| = " + fmt_double(herm));
  }
  const Complex tr = matrix.trace();
  if (std::abs(tr - 1.0) > tol::kConstruction) {
    throw InputError("density matrix trace is not 1: trace = " + fmt_double(tr.real()));
  }
  matrix_ = 0.5 * (matrix + matrix.adjoint());
  const double min_eig = eigenvalues(matrix_).minCoeff();
  if (min_eig < -tol::kEigenFloor) {
    throw InputError("density matrix is not positive semidefinite: min eigenvalue = " +
                     fmt_double(min_eig));
  }
}

SpinSetting::SpinSetting(Party party, const Vec3& direction) : party_(party), direction_(direction) {
  const double norm = direction.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol::kConstruction) {
    throw InputError("measurement direction is not a unit vector: |n| = " + fmt_double(norm));
  }
}

ProductEnsemble::ProductEnsemble(std::vector<ProductTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw InputError("product ensemble is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (!std::isfinite(t.weight) || t.weight < 0.0) {
      throw InputError("ensemble term " + std::to_string(i) + " has negative weight");
    }
    if (!t.bloch_a.allFinite() || t.bloch_a.norm() > 1.0 + tol::kConstruction) {
      throw InputError("ensemble term " + std::to_string(i) + " has |blochA| > 1");
    }
    if (!t.bloch_b.allFinite() || t.bloch_b.norm() > 1.0 + tol::kConstruction) {
      throw InputError("ensemble term " + std::to_string(i) + " has |blochB| > 1");
    }
    total += t.weight;
  }
  if (std::abs(total - 1.0) > tol::kConstruction) {
    throw InputError("ensemble weights sum to " + fmt_double(total) + ", expected 1");
  }
}

const Matrix2& pauli(PauliAxis axis) {
  static const Matrix2 sx = (Matrix2() << 0, 1, 1, 0).finished();
  static const Matrix2 sy = (Matrix2() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const Matrix2 sz = (Matrix2() << 1, 0, 0, -1).finished();
  switch (axis) {
    case PauliAxis::X: return sx;
    case PauliAxis::Y: return sy;
    case PauliAxis::Z: return sz;
  }
  return sz;
}

Vec3 axis_vector(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return Vec3::UnitX();
    case PauliAxis::Y: return Vec3::UnitY();
    case PauliAxis::Z: return Vec3::UnitZ();
  }
  return Vec3::UnitZ();
}

PureState bell_state(BellLabel label) {
  Vector4 v = Vector4::Zero();
  switch (label) {
    case BellLabel::PhiPlus: v << kInvSqrt2, 0, 0, kInvSqrt2; break;
    case BellLabel::PhiMinus: v << kInvSqrt2, 0, 0, -kInvSqrt2; break;
    case BellLabel::PsiPlus: v << 0, kInvSqrt2, kInvSqrt2, 0; break;
    case BellLabel::PsiMinus: v << 0, kInvSqrt2, -kInvSqrt2, 0; break;
  }
  return PureState(v);
}

PureState phase_epr_state(double phase) {
  Vector4 v = Vector4::Zero();
  v(1) = kInvSqrt2;
  v(2) = std::polar(kInvSqrt2, -phase);
  return PureState(v);
}

TwoQubitState density_from_pure(const PureState& psi) {
  return TwoQubitState(psi.amplitudes() * psi.amplitudes().adjoint());
}

TwoQubitState bell_density(BellLabel label) {
  const bool phi = label == BellLabel::PhiPlus || label == BellLabel::PhiMinus;
  const bool plus = label == BellLabel::PhiPlus || label == BellLabel::PsiPlus;
  const int i = phi ? 0 : 1;
  const int j = phi ? 3 : 2;
  Matrix4 m = Matrix4::Zero();
  m(i, i) = m(j, j) = 0.5;
  m(i, j) = m(j, i) = plus ? 0.5 : -0.5;
  return TwoQubitState(m);
}

TwoQubitState phase_epr_density(double phase) {
  Matrix4 m = Matrix4::Zero();
  m(1, 1) = m(2, 2) = 0.5;
  m(1, 2) = 0.5 * Complex(std::cos(phase), std::sin(phase));
  m(2, 1) = std::conj(m(1, 2));
  return TwoQubitState(m);
}

TwoQubitState maximally_mixed() { return TwoQubitState(Matrix4::Identity() / 4.0); }

TwoQubitState werner_state(double w) {
  if (!std::isfinite(w) || w < -1.0 / 3.0 - tol::kConstruction || w > 1.0 + tol::kConstruction) {
    throw InputError("Werner weight must lie in [-1/3, 1], got " + fmt_double(w));
  }
  return TwoQubitState(w * bell_density(BellLabel::PsiMinus).matrix() + (1.0 - w) * Matrix4::Identity() / 4.0);
}

TwoQubitState mix(std::span<const TwoQubitState> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw InputError("mix needs one weight per state and at least one state");
  }
  Matrix4 m = Matrix4::Zero();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (weights[i] < 0.0) throw InputError("mixing weights must be non-negative");
    m += weights[i] * states[i].matrix();
  }
  return TwoQubitState(m);
}

Matrix2 bloch_qubit(const Vec3& n) {
  if (!n.allFinite() || n.norm() > 1.0 + tol::kConstruction) {
    throw InputError("Bloch vector longer than 1: |n| = " + fmt_double(n.norm()));
  }
  Matrix2 rho = Matrix2::Identity();
  rho += n.x() * pauli(PauliAxis::X) + n.y() * pauli(PauliAxis::Y) + n.z() * pauli(PauliAxis::Z);
  return 0.5 * rho;
}

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

TwoQubitState product_mixture(const ProductEnsemble& ensemble) {
  Matrix4 m = Matrix4::Zero();
  for (const auto& t : ensemble.terms()) {
    m += t.weight * kron(bloch_qubit(t.bloch_a), bloch_qubit(t.bloch_b));
  }
  return TwoQubitState(m);
}

Matrix2 spin_observable(const SpinSetting& setting) {
  const Vec3& n = setting.direction();
  return n.x() * pauli(PauliAxis::X) + n.y() * pauli(PauliAxis::Y) + n.z() * pauli(PauliAxis::Z);
}

double correlator(const TwoQubitState& rho, const SpinSetting& a, const SpinSetting& b) {
  if (a.party() != Party::Alice || b.party() != Party::Bob) {
    throw InputError("correlator expects an Alice setting followed by a Bob setting");
  }
  const Complex e = (rho.matrix() * kron(spin_observable(a), spin_observable(b))).trace();
  if (std::abs(e.imag()) > tol::kCorruption) {
    throw InvariantError("correlator has imaginary part " + fmt_double(e.imag()));
  }
  return e.real();
}

double pauli_correlator(const TwoQubitState& rho, PauliAxis a, PauliAxis b) {
  return correlator(rho, SpinSetting(Party::Alice, axis_vector(a)), SpinSetting(Party::Bob, axis_vector(b)));
}

OutcomeDistribution outcome_distribution(const TwoQubitState& rho, const SpinSetting& a,
                                         const SpinSetting& b) {
  if (a.party() != Party::Alice || b.party() != Party::Bob) {
    throw InputError("outcome_distribution expects an Alice setting followed by a Bob setting");
  }
  const Matrix2 id = Matrix2::Identity();
  const Matrix2 oa = spin_observable(a);
  const Matrix2 ob = spin_observable(b);
  OutcomeDistribution dist;
  for (int sa : {1, -1}) {
    for (int sb : {1, -1}) {
      const Matrix4 proj = kron(0.5 * (id + double(sa) * oa), 0.5 * (id + double(sb) * ob));
      const double p = (rho.matrix() * proj).trace().real();
      if (p < -tol::kDerived) {
        throw InvariantError("negative outcome probability " + fmt_double(p));
      }
      dist.p[OutcomeDistribution::index(sa, sb)] = std::max(p, 0.0);
    }
  }
  return dist;
}

Matrix4 partial_transpose_bob(const Matrix4& m) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = m.block<2, 2>(2 * i, 2 * j).transpose();
  return out;
}

Eigen::Vector4d eigenvalues(const Matrix4& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

bool is_ppt(const TwoQubitState& rho) {
  return eigenvalues(partial_transpose_bob(rho.matrix())).minCoeff() >= -tol::kEigenFloor;
}

}  // namespace kslab
