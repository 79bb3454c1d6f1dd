#include "kslab/witnesses.hpp"

#include <cmath>
#include <string>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

const double kSqrt2 = std::sqrt(2.0);

WitnessVerdict two_sided(double statistic, double bound, double tolerance) {
  return {statistic, bound, std::abs(statistic) > bound + tolerance, std::abs(statistic) - bound};
}

// <B|rho|B> using the two-entry support of each Bell vector.
double overlap(const TwoQubitState& rho, BellLabel label) {
  const bool phi = label == BellLabel::PhiPlus || label == BellLabel::PhiMinus;
  const bool plus = label == BellLabel::PhiPlus || label == BellLabel::PsiPlus;
  const int i = phi ? 0 : 1;
  const int j = phi ? 3 : 2;
  const double cross = rho(i, j).real();
  return 0.5 * (rho(i, i).real() + rho(j, j).real()) + (plus ? cross : -cross);
}

}  // namespace

EkertSettings EkertSettings::standard() {
  const double r = 1.0 / kSqrt2;
  return {SpinSetting::alice(1, 0, 0), SpinSetting::alice(0, 1, 0), SpinSetting::bob(r, r, 0),
          SpinSetting::bob(-r, r, 0)};
}

double BellFidelities::of(BellLabel label) const {
  switch (label) {
    case BellLabel::PhiPlus: return phi_plus;
    case BellLabel::PhiMinus: return phi_minus;
    case BellLabel::PsiPlus: return psi_plus;
    case BellLabel::PsiMinus: return psi_minus;
  }
  return 0.0;
}

KSSigns ks_signs(KSCase c) {
  switch (c) {
    case KSCase::CaseI: return {+1, +1, -1};
    case KSCase::CaseII: return {-1, -1, -1};
    case KSCase::CaseIII: return {+1, -1, +1};
  }
  return {0, 0, 0};
}

BellLabel ks_partner(KSCase c) {
  switch (c) {
    case KSCase::CaseI: return BellLabel::PsiPlus;
    case KSCase::CaseII: return BellLabel::PsiMinus;
    case KSCase::CaseIII: return BellLabel::PhiPlus;
  }
  return BellLabel::PsiMinus;
}

const char* to_string(KSCase c) {
  switch (c) {
    case KSCase::CaseI: return "caseI";
    case KSCase::CaseII: return "caseII";
    case KSCase::CaseIII: return "caseIII";
  }
  return "unknown";
}

double ekert_statistic(const TwoQubitState& rho, const EkertSettings& s) {
  return correlator(rho, s.a1, s.b1) - correlator(rho, s.a1, s.b3) + correlator(rho, s.a3, s.b1) +
         correlator(rho, s.a3, s.b3);
}

WitnessVerdict ekert_verdict(const TwoQubitState& rho, const EkertSettings& s, double tolerance) {
  return two_sided(ekert_statistic(rho, s), kSqrt2, tolerance);
}

double pair_correlator_sum(const TwoQubitState& rho, PairAxes axes) {
  const double xx = pauli_correlator(rho, PauliAxis::X, PauliAxis::X);
  const PauliAxis other = axes == PairAxes::XX_YY ? PauliAxis::Y : PauliAxis::Z;
  return xx + pauli_correlator(rho, other, other);
}

WitnessVerdict bbm_verdict(const TwoQubitState& rho, double tolerance) {
  return two_sided(pair_correlator_sum(rho, PairAxes::XX_ZZ), 1.0, tolerance);
}

BellFidelities bell_fidelities(const TwoQubitState& rho) {
  return {overlap(rho, BellLabel::PhiPlus), overlap(rho, BellLabel::PhiMinus), overlap(rho, BellLabel::PsiPlus),
          overlap(rho, BellLabel::PsiMinus)};
}

IdentityResiduals fidelity_identities_check(const TwoQubitState& rho) {
  const BellFidelities f = bell_fidelities(rho);
  IdentityResiduals r;
  r.xx_yy = std::abs(pair_correlator_sum(rho, PairAxes::XX_YY) - 2.0 * (f.psi_plus - f.psi_minus));
  r.xx_zz = std::abs(pair_correlator_sum(rho, PairAxes::XX_ZZ) - 2.0 * (f.phi_plus - f.psi_minus));
  if (r.xx_yy > tol::kCorruption || r.xx_zz > tol::kCorruption) {
    throw InvariantError("Bell fidelity identity broken: residuals " + std::to_string(r.xx_yy) + ", " +
                         std::to_string(r.xx_zz));
  }
  return r;
}

DistillabilityVerdict distillable_witness(const TwoQubitState& rho, double tolerance) {
  const BellFidelities f = bell_fidelities(rho);
  for (BellLabel label : kBellLabels) {
    if (f.of(label) > 0.5 + tolerance) return {label};
  }
  return {};
}

double ks_functional(const TwoQubitState& rho, KSCase c) {
  const KSSigns s = ks_signs(c);
  return 1.0 + s.xx * pauli_correlator(rho, PauliAxis::X, PauliAxis::X) +
         s.yy * pauli_correlator(rho, PauliAxis::Y, PauliAxis::Y) +
         s.zz * pauli_correlator(rho, PauliAxis::Z, PauliAxis::Z);
}

WitnessVerdict ks_verdict(const TwoQubitState& rho, KSCase c, double tolerance) {
  const double value = ks_functional(rho, c);
  return {value, 2.0, value > 2.0 + tolerance, value - 2.0};
}

}  // namespace kslab
