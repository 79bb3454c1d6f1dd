#pragma once

// Inequality functionals on a candidate two-qubit state: the Ekert and BBM
// statistics, the three product-rule (KS) functionals, Bell fidelities and
// the fidelity-based distillability test.

#include <array>
#include <optional>

#include "kslab/qstate.hpp"

namespace kslab {

inline constexpr double kDefaultVerdictTolerance = 1e-10;

// Two anticommuting settings per party. standard() is a1 = x, a3 = y,
// b1 = (x + y)/sqrt2, b3 = (y - x)/sqrt2.
struct EkertSettings {
  SpinSetting a1;
  SpinSetting a3;
  SpinSetting b1;
  SpinSetting b3;

  static EkertSettings standard();
};

struct WitnessVerdict {
  double statistic = 0.0;
  double bound = 0.0;
  bool violated = false;
  double margin = 0.0;
};

struct BellFidelities {
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  double psi_plus = 0.0;
  double psi_minus = 0.0;

  double of(BellLabel label) const;
};

enum class KSCase { CaseI, CaseII, CaseIII };
inline constexpr std::array<KSCase, 3> kKSCases = {KSCase::CaseI, KSCase::CaseII, KSCase::CaseIII};

struct KSSigns {
  int xx;
  int yy;
  int zz;
};

// (+,+,-), (-,-,-), (+,-,+) for cases I, II, III.
KSSigns ks_signs(KSCase c);
// The Bell state whose fidelity the case bounds: Psi+, Psi-, Phi+.
BellLabel ks_partner(KSCase c);
const char* to_string(KSCase c);

enum class PairAxes { XX_YY, XX_ZZ };

// S = E(a1 b1) - E(a1 b3) + E(a3 b1) + E(a3 b3).
double ekert_statistic(const TwoQubitState& rho, const EkertSettings& s = EkertSettings::standard());

// Two-sided test |S| > sqrt(2).
WitnessVerdict ekert_verdict(const TwoQubitState& rho, const EkertSettings& s = EkertSettings::standard(),
                             double tolerance = kDefaultVerdictTolerance);

double pair_correlator_sum(const TwoQubitState& rho, PairAxes axes);

// T = E(xx) + E(zz), two-sided test |T| > 1.
WitnessVerdict bbm_verdict(const TwoQubitState& rho, double tolerance = kDefaultVerdictTolerance);

BellFidelities bell_fidelities(const TwoQubitState& rho);

struct IdentityResiduals {
  double xx_yy = 0.0;  // |E(xx)+E(yy) - 2(F_Psi+ - F_Psi-)|
  double xx_zz = 0.0;  // |E(xx)+E(zz) - 2(F_Phi+ - F_Psi-)|
};

// Self-test of the correlator/fidelity identities. Throws InvariantError when
// either residual exceeds 1e-8.
IdentityResiduals fidelity_identities_check(const TwoQubitState& rho);

struct DistillabilityVerdict {
  std::optional<BellLabel> bell;  // empty means inconclusive
  bool distillable() const { return bell.has_value(); }
};

DistillabilityVerdict distillable_witness(const TwoQubitState& rho,
                                          double tolerance = kDefaultVerdictTolerance);

// 1 + s_xx E(xx) + s_yy E(yy) + s_zz E(zz).
double ks_functional(const TwoQubitState& rho, KSCase c);

// One-sided test functional > 2.
WitnessVerdict ks_verdict(const TwoQubitState& rho, KSCase c, double tolerance = kDefaultVerdictTolerance);

}  // namespace kslab
