#include "kslab/hidden_variables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "kslab/errors.hpp"
#include "kslab/simplex.hpp"

namespace kslab {

// ---------------------------------------------------------------------------
// Product-rule assignments

const char* to_string(SingleObservable o) {
  switch (o) {
    case SingleObservable::AliceX: return "ax";
    case SingleObservable::AliceY: return "ay";
    case SingleObservable::AliceZ: return "az";
    case SingleObservable::BobX: return "bx";
    case SingleObservable::BobY: return "by";
    case SingleObservable::BobZ: return "bz";
  }
  return "?";
}

const char* to_string(ProductObservable o) {
  switch (o) {
    case ProductObservable::XX: return "xx";
    case ProductObservable::YY: return "yy";
    case ProductObservable::XY: return "xy";
    case ProductObservable::YX: return "yx";
    case ProductObservable::ZZ: return "zz";
  }
  return "?";
}

KSAssignment KSAssignment::from_singles(const std::array<int, kSingleObservables>& singles) {
  for (int v : singles) {
    if (v != 1 && v != -1) throw InputError("KS single values must be +1 or -1");
  }
  KSAssignment a;
  a.single = singles;
  const int ax = a.value(SingleObservable::AliceX);
  const int ay = a.value(SingleObservable::AliceY);
  const int bx = a.value(SingleObservable::BobX);
  const int by = a.value(SingleObservable::BobY);
  a.product[static_cast<std::size_t>(ProductObservable::XX)] = ax * bx;
  a.product[static_cast<std::size_t>(ProductObservable::YY)] = ay * by;
  a.product[static_cast<std::size_t>(ProductObservable::XY)] = ax * by;
  a.product[static_cast<std::size_t>(ProductObservable::YX)] = ay * bx;
  a.product[static_cast<std::size_t>(ProductObservable::ZZ)] = (ax * bx) * (ay * by);
  return a;
}

bool KSAssignment::satisfies_product_rule() const {
  using P = ProductObservable;
  using S = SingleObservable;
  for (int v : single)
    if (v != 1 && v != -1) return false;
  for (int v : product)
    if (v != 1 && v != -1) return false;
  return value(P::XX) == value(S::AliceX) * value(S::BobX) && value(P::YY) == value(S::AliceY) * value(S::BobY) &&
         value(P::XY) == value(S::AliceX) * value(S::BobY) && value(P::YX) == value(S::AliceY) * value(S::BobX) &&
         value(P::ZZ) == value(P::XX) * value(P::YY) && value(P::ZZ) == value(P::XY) * value(P::YX);
}

std::vector<KSAssignment> enumerate_ks_assignments() {
  std::vector<KSAssignment> out;
  out.reserve(1u << kSingleObservables);
  for (unsigned mask = 0; mask < (1u << kSingleObservables); ++mask) {
    std::array<int, kSingleObservables> singles{};
    for (std::size_t k = 0; k < kSingleObservables; ++k) singles[k] = (mask >> k) & 1u ? -1 : 1;
    out.push_back(KSAssignment::from_singles(singles));
  }
  return out;
}

int ks_functional_value(const KSAssignment& a, KSCase c) {
  const KSSigns s = ks_signs(c);
  return 1 + s.xx * a.value(ProductObservable::XX) + s.yy * a.value(ProductObservable::YY) +
         s.zz * a.value(ProductObservable::ZZ);
}

double ks_classical_bound(KSCase c) {
  int best = std::numeric_limits<int>::min();
  for (const auto& a : enumerate_ks_assignments()) best = std::max(best, ks_functional_value(a, c));
  return best;
}

// ---------------------------------------------------------------------------
// Correlator tables and local models

void CorrelatorQuad::validate() const {
  const std::array<std::pair<const char*, double>, 8> entries = {{{"c11", c11},
                                                                  {"c13", c13},
                                                                  {"c31", c31},
                                                                  {"c33", c33},
                                                                  {"alice1", alice1},
                                                                  {"alice3", alice3},
                                                                  {"bob1", bob1},
                                                                  {"bob3", bob3}}};
  for (const auto& [name, v] : entries) {
    if (!std::isfinite(v) || std::abs(v) > 1.0 + tol::kConstruction) {
      throw InputError(std::string("correlator entry ") + name + " = " + std::to_string(v) +
                       " is outside [-1, 1]");
    }
  }
}

CorrelatorQuad correlator_quad(const TwoQubitState& rho, const SpinSetting& a1, const SpinSetting& a3,
                               const SpinSetting& b1, const SpinSetting& b3) {
  const auto marginal = [&](const SpinSetting& s) {
    const Matrix2 o = spin_observable(s);
    const Matrix4 op = s.party() == Party::Alice ? kron(o, Matrix2::Identity()) : kron(Matrix2::Identity(), o);
    return (rho.matrix() * op).trace().real();
  };
  CorrelatorQuad q;
  q.c11 = correlator(rho, a1, b1);
  q.c13 = correlator(rho, a1, b3);
  q.c31 = correlator(rho, a3, b1);
  q.c33 = correlator(rho, a3, b3);
  q.alice1 = marginal(a1);
  q.alice3 = marginal(a3);
  q.bob1 = marginal(b1);
  q.bob3 = marginal(b3);
  return q;
}

double ChshPanel::max_value() const { return *std::max_element(values.begin(), values.end()); }

ChshPanel chsh_panel(const CorrelatorQuad& q, double tolerance) {
  q.validate();
  const std::array<double, 4> c = q.correlators();
  const double total = c[0] + c[1] + c[2] + c[3];
  ChshPanel panel;
  for (std::size_t k = 0; k < 4; ++k) {
    panel.values[k] = std::abs(total - 2.0 * c[k]);
    panel.values[4 + k] = std::abs(-total + 2.0 * c[k]);
  }
  panel.local = std::all_of(panel.values.begin(), panel.values.end(), [&](double v) { return v <= 2.0 + tolerance; });
  return panel;
}

LocalStrategy local_strategy(std::size_t index) {
  const auto bit = [&](int k) { return (index >> k) & 1u ? -1 : 1; };
  return {bit(3), bit(2), bit(1), bit(0)};
}

CorrelatorQuad LocalModel::reproduce() const {
  CorrelatorQuad q;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const LocalStrategy s = local_strategy(i);
    const double w = weights[i];
    q.c11 += w * s.alice1 * s.bob1;
    q.c13 += w * s.alice1 * s.bob3;
    q.c31 += w * s.alice3 * s.bob1;
    q.c33 += w * s.alice3 * s.bob3;
    q.alice1 += w * s.alice1;
    q.alice3 += w * s.alice3;
    q.bob1 += w * s.bob1;
    q.bob3 += w * s.bob3;
  }
  return q;
}

std::optional<LocalModel> fine_local_model(const CorrelatorQuad& q) {
  q.validate();
  Eigen::MatrixXd a(9, 16);
  for (Eigen::Index j = 0; j < 16; ++j) {
    const LocalStrategy s = local_strategy(static_cast<std::size_t>(j));
    a.col(j) << 1.0, s.alice1 * s.bob1, s.alice1 * s.bob3, s.alice3 * s.bob1, s.alice3 * s.bob3, s.alice1,
        s.alice3, s.bob1, s.bob3;
  }
  Eigen::VectorXd b(9);
  b << 1.0, q.c11, q.c13, q.c31, q.c33, q.alice1, q.alice3, q.bob1, q.bob3;

  const lp::FeasibilityResult lp_result = lp::find_feasible_point(a, b);
  if (!lp_result.feasible) return std::nullopt;

  // The rows of `a` are mutually orthogonal characters with squared norm 16,
  // so the minimum-norm solution is a^T b / 16. Prefer it when it is a valid
  // distribution; it is the symmetric model (uniform for the zero table).
  Eigen::VectorXd x = a.transpose() * b / 16.0;
  if (x.minCoeff() < -1e-12) x = lp_result.x;
  x = x.cwiseMax(0.0);

  LocalModel model;
  for (Eigen::Index j = 0; j < 16; ++j) model.weights[static_cast<std::size_t>(j)] = x(j);

  const CorrelatorQuad r = model.reproduce();
  const double err = std::max({std::abs(r.c11 - q.c11), std::abs(r.c13 - q.c13), std::abs(r.c31 - q.c31),
                               std::abs(r.c33 - q.c33), std::abs(r.alice1 - q.alice1), std::abs(r.alice3 - q.alice3),
                               std::abs(r.bob1 - q.bob1), std::abs(r.bob3 - q.bob3), std::abs(x.sum() - 1.0)});
  if (err > tol::kCorruption) {
    throw InvariantError("local model does not reproduce its target table: error " + std::to_string(err));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Separable bounds

const char* to_string(FunctionalId id) {
  switch (id) {
    case FunctionalId::EkertS: return "ekert-s";
    case FunctionalId::BbmT: return "bbm-t";
    case FunctionalId::KS_I: return "ks-i";
    case FunctionalId::KS_II: return "ks-ii";
    case FunctionalId::KS_III: return "ks-iii";
  }
  return "?";
}

std::optional<FunctionalId> parse_functional_id(const std::string& s) {
  for (FunctionalId id : kFunctionalIds) {
    if (s == to_string(id)) return id;
  }
  return std::nullopt;
}

double analytic_bound(FunctionalId id) {
  switch (id) {
    case FunctionalId::EkertS: return std::numbers::sqrt2;
    case FunctionalId::BbmT: return 1.0;
    case FunctionalId::KS_I:
    case FunctionalId::KS_II:
    case FunctionalId::KS_III: return 2.0;
  }
  return 0.0;
}

bool is_two_sided(FunctionalId id) { return id == FunctionalId::EkertS || id == FunctionalId::BbmT; }

double evaluate_functional(FunctionalId id, const TwoQubitState& rho) {
  switch (id) {
    case FunctionalId::EkertS: return ekert_statistic(rho);
    case FunctionalId::BbmT: return pair_correlator_sum(rho, PairAxes::XX_ZZ);
    case FunctionalId::KS_I: return ks_functional(rho, KSCase::CaseI);
    case FunctionalId::KS_II: return ks_functional(rho, KSCase::CaseII);
    case FunctionalId::KS_III: return ks_functional(rho, KSCase::CaseIII);
  }
  return 0.0;
}

ProductForm product_form(FunctionalId id) {
  const auto at = [id](const Vec3& n, const Vec3& m) {
    return evaluate_functional(id, product_mixture(ProductEnsemble({{1.0, n, m}})));
  };
  const Vec3 zero = Vec3::Zero();
  ProductForm f;
  f.constant = at(zero, zero);
  for (int i = 0; i < 3; ++i) {
    f.alice(i) = at(Vec3::Unit(i), zero) - f.constant;
    f.bob(i) = at(zero, Vec3::Unit(i)) - f.constant;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      f.coupling(i, j) = at(Vec3::Unit(i), Vec3::Unit(j)) - f.constant - f.alice(i) - f.bob(j);
  return f;
}

namespace {

Vec3 sphere_point(double polar, double azimuth) {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
}

// (polarA, azimuthA, polarB, azimuthB)
using Angles = std::array<double, 4>;

struct Candidate {
  double value;
  Angles angles;
};

// Higher value first; equal values keep lexicographic angle order.
bool better(const Candidate& lhs, const Candidate& rhs) {
  if (lhs.value != rhs.value) return lhs.value > rhs.value;
  return lhs.angles < rhs.angles;
}

void offer(std::vector<Candidate>& top, std::size_t capacity, const Candidate& c) {
  if (top.size() == capacity && !better(c, top.back())) return;
  auto pos = std::upper_bound(top.begin(), top.end(), c, better);
  top.insert(pos, c);
  if (top.size() > capacity) top.pop_back();
}

std::vector<Vec3> seed_directions() {
  const double r = 1.0 / std::numbers::sqrt2;
  std::vector<Vec3> dirs;
  for (const Vec3& d : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(r, r, 0), Vec3(-r, r, 0)}) {
    dirs.push_back(d);
    dirs.push_back(-d);
  }
  return dirs;
}

Angles angles_of(const Vec3& n, const Vec3& m) {
  return {std::acos(std::clamp(n.z(), -1.0, 1.0)), std::atan2(n.y(), n.x()), std::acos(std::clamp(m.z(), -1.0, 1.0)),
          std::atan2(m.y(), m.x())};
}

}  // namespace

BoundReport separable_bound(FunctionalId id, const BoundSearchOptions& opts) {
  if (opts.polar_steps < 2 || opts.azimuth_steps < 1 || opts.refine_starts < 1 || !(opts.min_step > 0.0)) {
    throw InputError("bound search needs polar_steps >= 2, azimuth_steps >= 1, refine_starts >= 1, min_step > 0");
  }
  const ProductForm form = product_form(id);
  const bool two_sided = is_two_sided(id);
  const auto score = [&](double v) { return two_sided ? std::abs(v) : v; };
  const auto objective = [&](const Angles& x) {
    return score(form(sphere_point(x[0], x[1]), sphere_point(x[2], x[3])));
  };

  std::vector<double> polar(static_cast<std::size_t>(opts.polar_steps));
  std::vector<double> azimuth(static_cast<std::size_t>(opts.azimuth_steps));
  for (int j = 0; j < opts.polar_steps; ++j) polar[static_cast<std::size_t>(j)] = std::numbers::pi * j / opts.polar_steps;
  for (int k = 0; k < opts.azimuth_steps; ++k)
    azimuth[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / opts.azimuth_steps;

  struct GridPoint {
    double polar;
    double azimuth;
    Vec3 n;
  };
  std::vector<GridPoint> grid;
  grid.reserve(polar.size() * azimuth.size());
  for (double p : polar)
    for (double a : azimuth) grid.push_back({p, a, sphere_point(p, a)});

  const std::size_t capacity = static_cast<std::size_t>(opts.refine_starts);
  std::vector<Candidate> top;
  std::size_t evaluations = 0;

  for (const GridPoint& ga : grid) {
    const double base = form.constant + form.alice.dot(ga.n);
    const Vec3 slope = form.bob + form.coupling.transpose() * ga.n;
    for (const GridPoint& gb : grid) {
      const double v = score(base + slope.dot(gb.n));
      if (top.size() < capacity || v >= top.back().value) {
        offer(top, capacity, {v, {ga.polar, ga.azimuth, gb.polar, gb.azimuth}});
      }
    }
    evaluations += grid.size();
  }
  const std::vector<Vec3> seeds = seed_directions();
  for (const Vec3& n : seeds) {
    for (const Vec3& m : seeds) {
      offer(top, capacity, {score(form(n, m)), angles_of(n, m)});
      ++evaluations;
    }
  }

  // Coordinate ascent on the four angles from each retained start.
  std::size_t refine_evals = 0;
  Candidate best = top.front();
  for (const Candidate& start : top) {
    Candidate cur = start;
    double step = std::numbers::pi / opts.polar_steps;
    while (step >= opts.min_step && refine_evals < opts.max_refine_evaluations) {
      bool moved = false;
      for (std::size_t c = 0; c < 4 && !moved; ++c) {
        for (double dir : {1.0, -1.0}) {
          if (refine_evals >= opts.max_refine_evaluations) break;
          Angles trial = cur.angles;
          trial[c] += dir * step;
          const double v = objective(trial);
          ++refine_evals;
          if (v > cur.value) {
            cur = {v, trial};
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (better(cur, best)) best = cur;
  }

  BoundReport report;
  report.id = id;
  report.supremum = best.value;
  report.argmax = {1.0, sphere_point(best.angles[0], best.angles[1]), sphere_point(best.angles[2], best.angles[3])};
  report.refine_evaluations = refine_evals;
  report.evaluations = evaluations + refine_evals;
  report.analytic_bound = analytic_bound(id);
  return report;
}

ExpansionResiduals separable_expansion_check(const ProductEnsemble& e, const EkertSettings& s) {
  const TwoQubitState rho = product_mixture(e);
  const Vec3& a1 = s.a1.direction();
  const Vec3& a3 = s.a3.direction();
  const Vec3& b1 = s.b1.direction();
  const Vec3& b3 = s.b3.direction();
  const Vec3 x = Vec3::UnitX();
  const Vec3 z = Vec3::UnitZ();

  double s_expansion = 0.0;
  double t_expansion = 0.0;
  for (const ProductTerm& t : e.terms()) {
    const Vec3& n = t.bloch_a;
    const Vec3& m = t.bloch_b;
    s_expansion += t.weight * (a1.dot(n) * b1.dot(m) - a1.dot(n) * b3.dot(m) + a3.dot(n) * b1.dot(m) +
                               a3.dot(n) * b3.dot(m));
    t_expansion += t.weight * (x.dot(n) * x.dot(m) + z.dot(n) * z.dot(m));
  }
  ExpansionResiduals r;
  r.ekert = std::abs(ekert_statistic(rho, s) - s_expansion);
  r.bbm = std::abs(pair_correlator_sum(rho, PairAxes::XX_ZZ) - t_expansion);
  if (r.ekert > tol::kCorruption || r.bbm > tol::kCorruption) {
    throw InvariantError("product-state expansion disagrees with the trace formula");
  }
  return r;
}

}  // namespace kslab
