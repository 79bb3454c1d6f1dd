#pragma once

// Classical models for the witness functionals: product-rule value
// assignments over the eleven Pauli observables, local deterministic
// strategies on a 2x2 setting grid, CHSH panels, and a numerical search for
// the largest value a functional reaches on product states.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kslab/qstate.hpp"
#include "kslab/witnesses.hpp"

namespace kslab {

// ---------------------------------------------------------------------------
// Product-rule assignments

enum class SingleObservable { AliceX, AliceY, AliceZ, BobX, BobY, BobZ };
enum class ProductObservable { XX, YY, XY, YX, ZZ };

inline constexpr std::size_t kSingleObservables = 6;
inline constexpr std::size_t kProductObservables = 5;

const char* to_string(SingleObservable o);
const char* to_string(ProductObservable o);

// One valuation f(., omega). Products are derived from the singles:
// f(ij) = f(a_i) f(b_j) for the four mixed x/y products, and
// f(zz) = f(xx) f(yy).
struct KSAssignment {
  std::array<int, kSingleObservables> single{};
  std::array<int, kProductObservables> product{};

  int value(SingleObservable o) const { return single[static_cast<std::size_t>(o)]; }
  int value(ProductObservable o) const { return product[static_cast<std::size_t>(o)]; }

  static KSAssignment from_singles(const std::array<int, kSingleObservables>& singles);
  bool satisfies_product_rule() const;
};

// All 2^6 assignments; bit k of the index set means single observable k = -1.
std::vector<KSAssignment> enumerate_ks_assignments();

// 1 + s_xx f(xx) + s_yy f(yy) + s_zz f(zz); always +-2.
int ks_functional_value(const KSAssignment& a, KSCase c);

// Maximum of ks_functional_value over the enumeration.
double ks_classical_bound(KSCase c);

// ---------------------------------------------------------------------------
// Correlator tables and local models

struct CorrelatorQuad {
  double c11 = 0.0;
  double c13 = 0.0;
  double c31 = 0.0;
  double c33 = 0.0;
  double alice1 = 0.0;
  double alice3 = 0.0;
  double bob1 = 0.0;
  double bob3 = 0.0;

  // Throws InputError if any entry lies outside [-1, 1] (1e-12 slack).
  void validate() const;
  std::array<double, 4> correlators() const { return {c11, c13, c31, c33}; }
};

// Quad from a state and explicit settings (a1, a3 for Alice; b1, b3 for Bob).
CorrelatorQuad correlator_quad(const TwoQubitState& rho, const SpinSetting& a1, const SpinSetting& a3,
                               const SpinSetting& b1, const SpinSetting& b3);

struct ChshPanel {
  // |sum of signed correlators| for the eight sign patterns with an odd
  // number of minus signs: first a single minus on c11, c13, c31, c33, then a
  // single plus on c11, c13, c31, c33.
  std::array<double, 8> values{};
  bool local = true;

  double max_value() const;
};

ChshPanel chsh_panel(const CorrelatorQuad& q, double tolerance = kDefaultVerdictTolerance);

// Deterministic local strategies are indexed by (A1, A3, B1, B3) in {+-1}^4,
// with bit 3 of the index for A1 down to bit 0 for B3 and a set bit meaning -1.
struct LocalStrategy {
  int alice1;
  int alice3;
  int bob1;
  int bob3;
};
LocalStrategy local_strategy(std::size_t index);

struct LocalModel {
  std::array<double, 16> weights{};

  // Correlators and marginals this mixture of strategies produces.
  CorrelatorQuad reproduce() const;
};

// LP feasibility over the 16 strategies matching the four correlators and the
// four marginals. Empty when no local model exists.
std::optional<LocalModel> fine_local_model(const CorrelatorQuad& q);

// ---------------------------------------------------------------------------
// Separable bounds

enum class FunctionalId { EkertS, BbmT, KS_I, KS_II, KS_III };
inline constexpr std::array<FunctionalId, 5> kFunctionalIds = {
    FunctionalId::EkertS, FunctionalId::BbmT, FunctionalId::KS_I, FunctionalId::KS_II, FunctionalId::KS_III};

const char* to_string(FunctionalId id);
std::optional<FunctionalId> parse_functional_id(const std::string& s);

// Analytic maximum over separable states: sqrt2, 1, 2, 2, 2.
double analytic_bound(FunctionalId id);
// Ekert and BBM are judged on |value|, KS cases on the signed value.
bool is_two_sided(FunctionalId id);

// Functional value of a state (no absolute value applied).
double evaluate_functional(FunctionalId id, const TwoQubitState& rho);

// Restriction of a functional to rho_a(n) (x) rho_b(m):
// value = constant + alice.n + bob.m + n^T coupling m.
// Coefficients are read off evaluate_functional on sixteen product states.
struct ProductForm {
  double constant = 0.0;
  Vec3 alice = Vec3::Zero();
  Vec3 bob = Vec3::Zero();
  Eigen::Matrix3d coupling = Eigen::Matrix3d::Zero();

  double operator()(const Vec3& n, const Vec3& m) const {
    return constant + alice.dot(n) + bob.dot(m) + n.dot(coupling * m);
  }
};
ProductForm product_form(FunctionalId id);

struct BoundSearchOptions {
  int polar_steps = 64;
  int azimuth_steps = 64;
  // Coordinate ascent stops once the angular step falls below this.
  double min_step = 1e-6;
  std::size_t max_refine_evaluations = 100000;
  // Number of best grid points used as refinement starts.
  int refine_starts = 8;
};

struct BoundReport {
  FunctionalId id = FunctionalId::EkertS;
  double supremum = 0.0;
  ProductTerm argmax;  // weight 1, pure Bloch vectors
  std::size_t evaluations = 0;
  std::size_t refine_evaluations = 0;
  double analytic_bound = 0.0;
};

BoundReport separable_bound(FunctionalId id, const BoundSearchOptions& opts = {});

struct ExpansionResiduals {
  double ekert = 0.0;  // |S(trace) - S(Bloch expansion)|
  double bbm = 0.0;    // |T(trace) - T(Bloch expansion)|
};

// Evaluates S and T on product_mixture(e) by the trace formula and by the
// weighted Bloch dot-product expansion. Throws InvariantError if either
// residual exceeds 1e-8.
ExpansionResiduals separable_expansion_check(const ProductEnsemble& e,
                                             const EkertSettings& s = EkertSettings::standard());

}  // namespace kslab
