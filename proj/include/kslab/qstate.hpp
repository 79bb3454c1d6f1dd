#pragma once

// Two-qubit state and observable algebra.
//
// Basis order is |++>, |+->, |-+>, |-->, with sigma_z|+> = +|+>. The first
// tensor factor is Alice's qubit and the second is Bob's.

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kslab {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;
using Vec3 = Eigen::Vector3d;

namespace tol {
inline constexpr double kConstruction = 1e-12;
inline constexpr double kDerived = 1e-10;
inline constexpr double kCorruption = 1e-8;
inline constexpr double kEigenFloor = 1e-10;
}  // namespace tol

enum class Party { Alice, Bob };
enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
inline constexpr std::array<BellLabel, 4> kBellLabels = {
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

const char* to_string(BellLabel label);

class PureState {
 public:
  // Throws InputError unless the vector has unit norm within 1e-12.
  explicit PureState(const Vector4& amplitudes);

  const Vector4& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_(i); }

 private:
  Vector4 amplitudes_;
};

// Density operator of two qubits. Construction validates hermiticity, unit
// trace and positivity; the stored matrix is the exact hermitian part.
class TwoQubitState {
 public:
  explicit TwoQubitState(const Matrix4& matrix);

  const Matrix4& matrix() const { return matrix_; }
  Complex operator()(int row, int col) const { return matrix_(row, col); }

 private:
  Matrix4 matrix_;
};

class SpinSetting {
 public:
  // Throws InputError unless |direction| = 1 within 1e-12.
  SpinSetting(Party party, const Vec3& direction);

  static SpinSetting alice(double x, double y, double z) { return {Party::Alice, Vec3(x, y, z)}; }
  static SpinSetting bob(double x, double y, double z) { return {Party::Bob, Vec3(x, y, z)}; }

  Party party() const { return party_; }
  const Vec3& direction() const { return direction_; }

 private:
  Party party_;
  Vec3 direction_;
};

struct ProductTerm {
  double weight = 0.0;
  Vec3 bloch_a = Vec3::Zero();
  Vec3 bloch_b = Vec3::Zero();
};

// Finite convex mixture of product states sum_i w_i rho_a(n_i) (x) rho_b(m_i).
class ProductEnsemble {
 public:
  // Throws InputError on an empty list, negative weights, weights not
  // summing to one, or Bloch vectors longer than 1.
  explicit ProductEnsemble(std::vector<ProductTerm> terms);

  std::span<const ProductTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<ProductTerm> terms_;
};

// Joint outcome probabilities indexed ++, +-, -+, -- (Alice first).
struct OutcomeDistribution {
  std::array<double, 4> p{};

  static constexpr int index(int alice_outcome, int bob_outcome) {
    return (alice_outcome > 0 ? 0 : 2) + (bob_outcome > 0 ? 0 : 1);
  }
  double prob(int alice_outcome, int bob_outcome) const { return p[index(alice_outcome, bob_outcome)]; }
  double correlator() const { return p[0] + p[3] - p[1] - p[2]; }
  double marginal_alice() const { return p[0] + p[1] - p[2] - p[3]; }
  double marginal_bob() const { return p[0] + p[2] - p[1] - p[3]; }
};

enum class PauliAxis { X, Y, Z };
const Matrix2& pauli(PauliAxis axis);
Vec3 axis_vector(PauliAxis axis);

PureState bell_state(BellLabel label);

// (|+-> + e^{-i phase}|-+>) / sqrt(2).
PureState phase_epr_state(double phase);

TwoQubitState density_from_pure(const PureState& psi);

// Bell projector with exact +-1/2 entries.
TwoQubitState bell_density(BellLabel label);
// Projector onto phase_epr_state(phase), built entrywise.
TwoQubitState phase_epr_density(double phase);

TwoQubitState maximally_mixed();

// w |Psi-><Psi-| + (1 - w) I/4. Valid for w in [-1/3, 1].
TwoQubitState werner_state(double w);

// Convex combination of states; weights must be non-negative and sum to 1.
TwoQubitState mix(std::span<const TwoQubitState> states, std::span<const double> weights);

// (I + n.sigma)/2. Throws InputError when |n| > 1 + 1e-12.
Matrix2 bloch_qubit(const Vec3& n);

TwoQubitState product_mixture(const ProductEnsemble& ensemble);

// n.sigma for a unit direction.
Matrix2 spin_observable(const SpinSetting& setting);

// tr[rho (a.sigma (x) b.sigma)]. Throws InputError when the settings belong to
// the wrong parties and InvariantError when the trace has an imaginary part
// above 1e-8.
double correlator(const TwoQubitState& rho, const SpinSetting& a, const SpinSetting& b);

// Correlator along Pauli axes, e.g. pauli_correlator(rho, X, X) = E(sx sx).
double pauli_correlator(const TwoQubitState& rho, PauliAxis a, PauliAxis b);

// Born-rule probabilities for the projectors (I +- n.sigma)/2 on each side.
OutcomeDistribution outcome_distribution(const TwoQubitState& rho, const SpinSetting& a,
                                         const SpinSetting& b);

Matrix4 kron(const Matrix2& a, const Matrix2& b);
Matrix4 partial_transpose_bob(const Matrix4& m);
Eigen::Vector4d eigenvalues(const Matrix4& m);
// Partial transpose has no eigenvalue below -1e-10.
bool is_ppt(const TwoQubitState& rho);

}  // namespace kslab
