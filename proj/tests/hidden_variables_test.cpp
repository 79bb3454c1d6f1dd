#include "kslab/hidden_variables.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "kslab/errors.hpp"
#include "support.hpp"

using namespace kslab;
using kslab::testing::Rng;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Largest CHSH combination with an odd number of minus signs, by brute force
// over all sixteen sign patterns.
double chsh_oracle(const std::array<double, 4>& c) {
  double best = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    if (__builtin_popcount(mask) % 2 == 0) continue;
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += ((mask >> k) & 1 ? -1.0 : 1.0) * c[k];
    best = std::max(best, std::abs(s));
  }
  return best;
}

// Fine: a joint distribution exists iff every pairwise distribution is
// non-negative and the CHSH inequalities hold.
bool fine_oracle(const CorrelatorQuad& q) {
  const std::array<std::array<double, 3>, 4> pairs = {{{q.c11, q.alice1, q.bob1},
                                                       {q.c13, q.alice1, q.bob3},
                                                       {q.c31, q.alice3, q.bob1},
                                                       {q.c33, q.alice3, q.bob3}}};
  for (const auto& [c, ma, mb] : pairs) {
    for (int a : {1, -1})
      for (int b : {1, -1})
        if (1 + a * ma + b * mb + a * b * c < -1e-9) return false;
  }
  return chsh_oracle(q.correlators()) <= 2.0 + 1e-10;
}

TwoQubitState bell(BellLabel b) { return density_from_pure(bell_state(b)); }

}  // namespace

TEST(KsAssignments, CountAndProductRule) {
  const auto all = enumerate_ks_assignments();
  ASSERT_EQ(all.size(), 64u);
  std::set<std::array<int, kSingleObservables>> seen;
  for (const auto& a : all) {
    EXPECT_TRUE(a.satisfies_product_rule());
    seen.insert(a.single);
    using P = ProductObservable;
    EXPECT_EQ(a.value(P::ZZ), a.value(P::XX) * a.value(P::YY));
    EXPECT_EQ(a.value(P::ZZ), a.value(P::XY) * a.value(P::YX));
    for (int v : a.single) EXPECT_TRUE(v == 1 || v == -1);
  }
  EXPECT_EQ(seen.size(), 64u);
}

TEST(KsAssignments, AllPlusSingles) {
  const KSAssignment a = KSAssignment::from_singles({1, 1, 1, 1, 1, 1});
  for (int v : a.product) EXPECT_EQ(v, 1);
  EXPECT_EQ(enumerate_ks_assignments().front().single, a.single);
}

TEST(KsAssignments, ProductRuleViolationDetected) {
  KSAssignment a = KSAssignment::from_singles({1, -1, 1, -1, 1, 1});
  EXPECT_TRUE(a.satisfies_product_rule());
  a.product[static_cast<std::size_t>(ProductObservable::ZZ)] *= -1;
  EXPECT_FALSE(a.satisfies_product_rule());
}

TEST(KsFunctionalValue, Examples) {
  // xx = yy = +1
  const KSAssignment plus = KSAssignment::from_singles({1, 1, 1, 1, 1, 1});
  EXPECT_EQ(ks_functional_value(plus, KSCase::CaseI), 2);
  // ax = ay = -1, bx = by = +1 gives xx = yy = -1
  const KSAssignment minus = KSAssignment::from_singles({-1, -1, 1, 1, 1, 1});
  EXPECT_EQ(minus.value(ProductObservable::XX), -1);
  EXPECT_EQ(minus.value(ProductObservable::YY), -1);
  EXPECT_EQ(ks_functional_value(minus, KSCase::CaseI), -2);
  // xx = +1, yy = -1
  const KSAssignment mixed = KSAssignment::from_singles({1, -1, 1, 1, 1, 1});
  EXPECT_EQ(ks_functional_value(mixed, KSCase::CaseII), 2);
}

TEST(KsFunctionalValue, AlwaysPlusMinusTwoWithBoundTwo) {
  for (KSCase c : kKSCases) {
    std::set<int> values;
    for (const auto& a : enumerate_ks_assignments()) values.insert(ks_functional_value(a, c));
    EXPECT_EQ(values, (std::set<int>{-2, 2}));
    EXPECT_DOUBLE_EQ(ks_classical_bound(c), 2.0);
  }
}

TEST(KsFunctionalValue, ConvexCombinationsStayInRange) {
  Rng rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto all = enumerate_ks_assignments();
  for (int t = 0; t < 200; ++t) {
    std::vector<double> w(all.size());
    double total = 0.0;
    for (double& x : w) total += (x = u(rng));
    for (KSCase c : kKSCases) {
      double e = 0.0;
      for (std::size_t i = 0; i < all.size(); ++i) e += w[i] / total * ks_functional_value(all[i], c);
      EXPECT_LE(e, 2.0 + 1e-12);
      EXPECT_GE(e, -2.0 - 1e-12);
    }
  }
}

TEST(CorrelatorQuad, ValidateRange) {
  EXPECT_NO_THROW((CorrelatorQuad{1.0 + 1e-13, -1, 0, 0}.validate()));
  EXPECT_THROW((CorrelatorQuad{1.1, 0, 0, 0}.validate()), InputError);
  CorrelatorQuad q;
  q.bob3 = -1.5;
  EXPECT_THROW(q.validate(), InputError);
}

TEST(CorrelatorQuad, FromStateMatchesOracle) {
  const TwoQubitState rho = bell(BellLabel::PsiMinus);
  const SpinSetting x_a = SpinSetting::alice(1, 0, 0);
  const SpinSetting z_a = SpinSetting::alice(0, 0, 1);
  const SpinSetting x_b = SpinSetting::bob(1, 0, 0);
  const SpinSetting z_b = SpinSetting::bob(0, 0, 1);
  const CorrelatorQuad q = correlator_quad(rho, x_a, z_a, x_b, z_b);
  EXPECT_NEAR(q.c11, -1, 1e-12);
  EXPECT_NEAR(q.c13, 0, 1e-12);
  EXPECT_NEAR(q.c31, 0, 1e-12);
  EXPECT_NEAR(q.c33, -1, 1e-12);
  EXPECT_NEAR(q.alice1 + q.alice3 + q.bob1 + q.bob3, 0, 1e-12);
}

TEST(ChshPanel, Examples) {
  const ChshPanel singlet = chsh_panel(CorrelatorQuad{-1, 0, 0, -1});
  EXPECT_TRUE(singlet.local);
  EXPECT_NEAR(singlet.max_value(), 2.0, 1e-12);
  const std::array<double, 8> expected = {0, 2, 2, 0, 0, 2, 2, 0};
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(singlet.values[k], expected[k], 1e-12);

  EXPECT_TRUE(chsh_panel(CorrelatorQuad{1, 0, 0, 1}).local);

  const ChshPanel pr = chsh_panel(CorrelatorQuad{1, 1, 1, -1});
  EXPECT_FALSE(pr.local);
  EXPECT_NEAR(pr.max_value(), 4.0, 1e-12);
  EXPECT_EQ(std::count_if(pr.values.begin(), pr.values.end(), [](double v) { return std::abs(v - 4) < 1e-12; }), 2);
}

TEST(ChshPanel, MaxMatchesBruteForce) {
  Rng rng(103);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const CorrelatorQuad q{u(rng), u(rng), u(rng), u(rng)};
    EXPECT_NEAR(chsh_panel(q).max_value(), chsh_oracle(q.correlators()), 1e-12);
  }
}

TEST(LocalStrategy, IndexLayout) {
  const LocalStrategy s0 = local_strategy(0);
  EXPECT_EQ(s0.alice1 + s0.alice3 + s0.bob1 + s0.bob3, 4);
  EXPECT_EQ(local_strategy(8).alice1, -1);
  EXPECT_EQ(local_strategy(8).alice3, 1);
  EXPECT_EQ(local_strategy(1).bob3, -1);
  EXPECT_EQ(local_strategy(1).bob1, 1);
}

TEST(FineLocalModel, SingletExample) {
  const auto m = fine_local_model(CorrelatorQuad{-1, 0, 0, -1});
  ASSERT_TRUE(m.has_value());
  const CorrelatorQuad r = m->reproduce();
  EXPECT_NEAR(r.c11, -1, 1e-12);
  EXPECT_NEAR(r.c13, 0, 1e-12);
  EXPECT_NEAR(r.c31, 0, 1e-12);
  EXPECT_NEAR(r.c33, -1, 1e-12);
}

TEST(FineLocalModel, ZeroQuadIsUniform) {
  const auto m = fine_local_model(CorrelatorQuad{});
  ASSERT_TRUE(m.has_value());
  for (double w : m->weights) EXPECT_NEAR(w, 1.0 / 16.0, 1e-12);
}

TEST(FineLocalModel, CHSHViolatingQuadInfeasible) {
  const double h = 1 / kSqrt2;
  const CorrelatorQuad q{h, -h, h, h};
  EXPECT_NEAR(chsh_panel(q).max_value(), 2 * kSqrt2, 1e-12);
  EXPECT_FALSE(fine_local_model(q).has_value());
  EXPECT_FALSE(fine_local_model(CorrelatorQuad{1, 1, 1, -1}).has_value());
}

TEST(FineLocalModel, EquivalentToChshOnRandomQuads) {
  Rng rng(107);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0;
  for (int t = 0; t < 1000; ++t) {
    const CorrelatorQuad q{u(rng), u(rng), u(rng), u(rng)};
    const auto m = fine_local_model(q);
    ASSERT_EQ(m.has_value(), chsh_panel(q).local) << t;
    ASSERT_EQ(m.has_value(), fine_oracle(q)) << t;
    if (m) {
      ++feasible;
      double total = 0.0;
      for (double w : m->weights) {
        EXPECT_GE(w, -1e-9);
        total += w;
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
      const CorrelatorQuad r = m->reproduce();
      EXPECT_NEAR(r.c11, q.c11, 1e-8);
      EXPECT_NEAR(r.c13, q.c13, 1e-8);
      EXPECT_NEAR(r.c31, q.c31, 1e-8);
      EXPECT_NEAR(r.c33, q.c33, 1e-8);
      EXPECT_NEAR(r.alice1, 0, 1e-8);
      EXPECT_NEAR(r.bob3, 0, 1e-8);
    }
  }
  EXPECT_GT(feasible, 500);
  EXPECT_LT(feasible, 1000);
}

TEST(FineLocalModel, WithMarginalsAgreesWithFineOracle) {
  Rng rng(109);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0;
  for (int t = 0; t < 1000; ++t) {
    CorrelatorQuad q{u(rng), u(rng), u(rng), u(rng)};
    q.alice1 = 0.5 * u(rng);
    q.alice3 = 0.5 * u(rng);
    q.bob1 = 0.5 * u(rng);
    q.bob3 = 0.5 * u(rng);
    const auto m = fine_local_model(q);
    ASSERT_EQ(m.has_value(), fine_oracle(q)) << t;
    if (m) {
      ++feasible;
      const CorrelatorQuad r = m->reproduce();
      EXPECT_NEAR(r.alice1, q.alice1, 1e-8);
      EXPECT_NEAR(r.alice3, q.alice3, 1e-8);
      EXPECT_NEAR(r.bob1, q.bob1, 1e-8);
      EXPECT_NEAR(r.bob3, q.bob3, 1e-8);
      EXPECT_NEAR(r.c13, q.c13, 1e-8);
    }
  }
  EXPECT_GT(feasible, 100);
}

TEST(FineLocalModel, MixturesOfStrategiesAreFeasible) {
  Rng rng(113);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    LocalModel m;
    double total = 0.0;
    for (double& w : m.weights) total += (w = u(rng) < 0.3 ? u(rng) : 0.0);
    if (total == 0.0) continue;
    for (double& w : m.weights) w /= total;
    const CorrelatorQuad q = m.reproduce();
    const auto found = fine_local_model(q);
    ASSERT_TRUE(found.has_value());
    const CorrelatorQuad r = found->reproduce();
    EXPECT_NEAR(r.c11, q.c11, 1e-8);
    EXPECT_NEAR(r.alice3, q.alice3, 1e-8);
  }
}

TEST(FineLocalModel, ExemplarQuads) {
  const TwoQubitState phase = density_from_pure(phase_epr_state(std::numbers::pi / 4));
  const EkertSettings s = EkertSettings::standard();
  const CorrelatorQuad q = correlator_quad(phase, s.a1, s.a3, s.b1, s.b3);
  EXPECT_NEAR(q.c11, 1, 1e-12);
  EXPECT_NEAR(q.c13, 0, 1e-12);
  EXPECT_NEAR(q.c31, 0, 1e-12);
  EXPECT_NEAR(q.c33, 1, 1e-12);
  EXPECT_TRUE(chsh_panel(q).local);
  EXPECT_TRUE(fine_local_model(q).has_value());
}

TEST(FunctionalIds, NamesRoundTrip) {
  for (FunctionalId id : kFunctionalIds) EXPECT_EQ(parse_functional_id(to_string(id)), id);
  EXPECT_FALSE(parse_functional_id("ekert").has_value());
  EXPECT_DOUBLE_EQ(analytic_bound(FunctionalId::EkertS), kSqrt2);
  EXPECT_DOUBLE_EQ(analytic_bound(FunctionalId::BbmT), 1.0);
  EXPECT_DOUBLE_EQ(analytic_bound(FunctionalId::KS_III), 2.0);
}

TEST(ProductForm, MatchesTraceOnRandomProductStates) {
  Rng rng(127);
  for (FunctionalId id : kFunctionalIds) {
    const ProductForm f = product_form(id);
    for (int t = 0; t < 200; ++t) {
      const Vec3 n = kslab::testing::random_in_ball(rng);
      const Vec3 m = kslab::testing::random_in_ball(rng);
      const TwoQubitState rho = product_mixture(ProductEnsemble({{1.0, n, m}}));
      EXPECT_NEAR(f(n, m), evaluate_functional(id, rho), 1e-12);
    }
  }
}

TEST(SeparableBound, ReachesAnalyticBounds) {
  for (FunctionalId id : kFunctionalIds) {
    const BoundReport r = separable_bound(id);
    EXPECT_NEAR(r.supremum, analytic_bound(id), 1e-4) << to_string(id);
    EXPECT_LE(r.supremum, analytic_bound(id) + 1e-6) << to_string(id);
    EXPECT_LE(r.refine_evaluations, std::size_t{100000});
    EXPECT_GT(r.evaluations, r.refine_evaluations);
    EXPECT_NEAR(r.argmax.bloch_a.norm(), 1.0, 1e-12);
    EXPECT_NEAR(r.argmax.bloch_b.norm(), 1.0, 1e-12);
    // the argmax really attains the reported value
    const TwoQubitState rho = product_mixture(ProductEnsemble({r.argmax}));
    const double v = evaluate_functional(id, rho);
    EXPECT_NEAR(is_two_sided(id) ? std::abs(v) : v, r.supremum, 1e-10);
  }
}

TEST(SeparableBound, KsCaseOneBruteForceOracle) {
  // 1 + nx mx + ny my - nz mz sampled directly on both spheres
  Rng rng(131);
  double best = -10;
  for (int t = 0; t < 200000; ++t) {
    const Vec3 n = kslab::testing::random_unit(rng);
    const Vec3 m = kslab::testing::random_unit(rng);
    best = std::max(best, 1 + n.x() * m.x() + n.y() * m.y() - n.z() * m.z());
  }
  EXPECT_LE(best, 2.0 + 1e-12);
  EXPECT_GT(best, 1.99);
  EXPECT_NEAR(separable_bound(FunctionalId::KS_I).supremum, 2.0, 1e-4);
}

TEST(SeparableBound, Deterministic) {
  BoundSearchOptions o;
  o.polar_steps = 16;
  o.azimuth_steps = 16;
  const BoundReport a = separable_bound(FunctionalId::EkertS, o);
  const BoundReport b = separable_bound(FunctionalId::EkertS, o);
  EXPECT_EQ(a.supremum, b.supremum);
  EXPECT_EQ(a.argmax.bloch_a, b.argmax.bloch_a);
  EXPECT_EQ(a.argmax.bloch_b, b.argmax.bloch_b);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(SeparableBound, RefinementCapRespected) {
  BoundSearchOptions o;
  o.polar_steps = 8;
  o.azimuth_steps = 8;
  o.max_refine_evaluations = 50;
  const BoundReport r = separable_bound(FunctionalId::BbmT, o);
  EXPECT_LE(r.refine_evaluations, std::size_t{50});
  EXPECT_LE(r.supremum, 1.0 + 1e-6);
}

TEST(SeparableExpansion, Examples) {
  const ExpansionResiduals single = separable_expansion_check(ProductEnsemble({{1.0, Vec3(0, 0, 1), Vec3(0, 0, -1)}}));
  EXPECT_LE(single.ekert, 1e-15);
  EXPECT_LE(single.bbm, 1e-15);

  const ExpansionResiduals degenerate =
      separable_expansion_check(ProductEnsemble({{0.5, Vec3::Zero(), Vec3(1, 0, 0)}, {0.5, Vec3(0, 1, 0), Vec3::Zero()}}));
  EXPECT_LE(degenerate.ekert, 1e-10);
  EXPECT_LE(degenerate.bbm, 1e-10);

  Rng rng(137);
  for (int t = 0; t < 200; ++t) {
    const ExpansionResiduals r = separable_expansion_check(kslab::testing::random_ensemble(rng, 10, t % 2 == 0));
    EXPECT_LE(r.ekert, 1e-10);
    EXPECT_LE(r.bbm, 1e-10);
  }
}

TEST(SeparableExpansion, RandomEnsemblesRespectBounds) {
  Rng rng(139);
  for (int t = 0; t < 2000; ++t) {
    const TwoQubitState rho = product_mixture(kslab::testing::random_ensemble(rng));
    EXPECT_LE(std::abs(evaluate_functional(FunctionalId::EkertS, rho)), kSqrt2 + 1e-9);
    EXPECT_LE(std::abs(evaluate_functional(FunctionalId::BbmT, rho)), 1.0 + 1e-9);
    for (FunctionalId id : {FunctionalId::KS_I, FunctionalId::KS_II, FunctionalId::KS_III}) {
      EXPECT_LE(evaluate_functional(id, rho), 2.0 + 1e-9);
    }
  }
}
