#include "kslab/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "kslab/errors.hpp"
#include "kslab/rng.hpp"
#include "kslab/witnesses.hpp"

namespace kslab {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::E91: return "e91";
    case Protocol::BBM92: return "bbm92";
  }
  return "?";
}

const char* to_string(SettingPair p) {
  switch (p) {
    case SettingPair::A1B1: return "a1b1";
    case SettingPair::A1B3: return "a1b3";
    case SettingPair::A3B1: return "a3b1";
    case SettingPair::A3B3: return "a3b3";
    case SettingPair::XX: return "xx";
    case SettingPair::ZZ: return "zz";
  }
  return "?";
}

void ProtocolConfig::validate() const {
  if (rounds < 100) throw InputError("protocol needs at least 100 rounds, got " + std::to_string(rounds));
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("testFraction must lie strictly between 0 and 1");
  }
  if (test_fraction * static_cast<double>(rounds) < static_cast<double>(kMinTestSamples)) {
    throw InputError("testFraction * rounds must be at least 30");
  }
  if (!(abort_sigma >= 0.0) || !std::isfinite(abort_sigma)) throw InputError("abortSigma must be non-negative");
  if (const auto* ir = std::get_if<InterceptResend>(&eve); ir && ir->policy == InterceptResend::Policy::Direction) {
    SpinSetting(Party::Bob, ir->direction);
  }
}

double OutcomeTally::mean_product() const {
  const std::uint64_t n = total();
  if (n == 0) return 0.0;
  const double same = static_cast<double>(counts[0] + counts[3]);
  const double diff = static_cast<double>(counts[1] + counts[2]);
  return (same - diff) / static_cast<double>(n);
}

OutcomeTally& OutcomeTally::operator+=(const OutcomeTally& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

StatisticEstimate estimate_statistic(const TallyMap& tallies, Protocol protocol) {
  struct Term {
    SettingPair pair;
    double sign;
  };
  static const std::vector<Term> e91 = {
      {SettingPair::A1B1, 1.0}, {SettingPair::A1B3, -1.0}, {SettingPair::A3B1, 1.0}, {SettingPair::A3B3, 1.0}};
  static const std::vector<Term> bbm = {{SettingPair::XX, 1.0}, {SettingPair::ZZ, 1.0}};

  StatisticEstimate est;
  double variance = 0.0;
  for (const Term& t : protocol == Protocol::E91 ? e91 : bbm) {
    const auto it = tallies.find(t.pair);
    const std::uint64_t n = it == tallies.end() ? 0 : it->second.total();
    if (n < kMinTestSamples) {
      throw InputError(std::string("setting pair ") + to_string(t.pair) + " has " + std::to_string(n) +
                       " samples, need at least 30; increase rounds or testFraction");
    }
    const double m = it->second.mean_product();
    est.value += t.sign * m;
    variance += std::max(0.0, 1.0 - m * m) / static_cast<double>(n - 1);
  }
  est.standard_error = std::sqrt(variance);
  return est;
}

double qber(const std::vector<std::uint8_t>& key_a, const std::vector<std::uint8_t>& key_b) {
  if (key_a.empty() || key_b.empty()) throw InputError("QBER of an empty key is undefined");
  if (key_a.size() != key_b.size()) throw InputError("sifted keys have different lengths");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < key_a.size(); ++i) errors += (key_a[i] != key_b[i]);
  return static_cast<double>(errors) / static_cast<double>(key_a.size());
}

namespace {

Matrix4 dephase_bob(const Matrix4& rho, const Vec3& direction) {
  const Matrix2 obs = spin_observable(SpinSetting(Party::Bob, direction));
  Matrix4 out = Matrix4::Zero();
  for (double s : {1.0, -1.0}) {
    const Matrix4 p = kron(Matrix2::Identity(), 0.5 * (Matrix2::Identity() + s * obs));
    out += p * rho * p;
  }
  return out;
}

struct Sampler {
  std::vector<SpinSetting> alice;
  std::vector<SpinSetting> bob;
  std::vector<std::string> alice_names;
  std::vector<std::string> bob_names;
  // cumulative outcome probabilities per (alice, bob) index pair
  std::vector<std::array<double, 4>> cumulative;

  const std::array<double, 4>& cdf(std::size_t a, std::size_t b) const { return cumulative[a * bob.size() + b]; }
};

Sampler make_sampler(Protocol protocol, const TwoQubitState& state) {
  Sampler s;
  if (protocol == Protocol::E91) {
    const EkertSettings ek = EkertSettings::standard();
    s.alice = {ek.a1, ek.a3, SpinSetting::alice(0, 1, 0)};
    s.bob = {ek.b1, ek.b3, SpinSetting::bob(0, 1, 0)};
    s.alice_names = {"a1", "a3", "ak"};
    s.bob_names = {"b1", "b3", "bk"};
  } else {
    s.alice = {SpinSetting::alice(1, 0, 0), SpinSetting::alice(0, 0, 1)};
    s.bob = {SpinSetting::bob(1, 0, 0), SpinSetting::bob(0, 0, 1)};
    s.alice_names = {"x", "z"};
    s.bob_names = {"x", "z"};
  }
  for (const auto& a : s.alice) {
    for (const auto& b : s.bob) {
      const OutcomeDistribution d = outcome_distribution(state, a, b);
      std::array<double, 4> c{};
      double acc = 0.0;
      for (std::size_t i = 0; i < 4; ++i) c[i] = (acc += d.p[i]);
      s.cumulative.push_back(c);
    }
  }
  return s;
}

struct RoundRecord {
  std::uint8_t alice;
  std::uint8_t bob;
  std::uint8_t outcome;
  bool test;
};

enum Stream : std::uint32_t { kAliceSetting = 0, kBobSetting = 1, kOutcome = 2, kTestSelect = 3 };

void simulate_range(const Sampler& s, const CounterRng& rng, double test_fraction, std::uint64_t begin,
                    std::uint64_t end, std::vector<RoundRecord>& out) {
  const auto na = static_cast<std::uint32_t>(s.alice.size());
  const auto nb = static_cast<std::uint32_t>(s.bob.size());
  for (std::uint64_t r = begin; r < end; ++r) {
    RoundRecord rec{};
    rec.alice = static_cast<std::uint8_t>(rng.below(r, kAliceSetting, na));
    rec.bob = static_cast<std::uint8_t>(rng.below(r, kBobSetting, nb));
    const auto& cdf = s.cdf(rec.alice, rec.bob);
    const double u = rng.uniform(r, kOutcome) * cdf[3];
    std::uint8_t k = 0;
    while (k < 3 && u >= cdf[k]) ++k;
    rec.outcome = k;
    rec.test = rng.uniform(r, kTestSelect) < test_fraction;
    out[r] = rec;
  }
}

int expected_sign(const TwoQubitState& source, PauliAxis axis) {
  return pauli_correlator(source, axis, axis) < 0.0 ? -1 : 1;
}

// Outcome index -> bit: +1 -> 0, -1 -> 1.
std::uint8_t alice_bit(std::uint8_t outcome) { return outcome >= 2 ? 1 : 0; }
std::uint8_t bob_bit(std::uint8_t outcome) { return outcome & 1u; }

}  // namespace

TwoQubitState effective_state(const TwoQubitState& source, const EveStrategy& eve) {
  if (std::holds_alternative<NoEve>(eve)) return source;
  if (const auto* sub = std::get_if<SeparableSubstitution>(&eve)) return product_mixture(sub->ensemble);

  const auto& ir = std::get<InterceptResend>(eve);
  switch (ir.policy) {
    case InterceptResend::Policy::FixedZ: return TwoQubitState(dephase_bob(source.matrix(), Vec3::UnitZ()));
    case InterceptResend::Policy::FixedX: return TwoQubitState(dephase_bob(source.matrix(), Vec3::UnitX()));
    case InterceptResend::Policy::RandomXZ:
      return TwoQubitState(0.5 * (dephase_bob(source.matrix(), Vec3::UnitX()) +
                                  dephase_bob(source.matrix(), Vec3::UnitZ())));
    case InterceptResend::Policy::Direction: return TwoQubitState(dephase_bob(source.matrix(), ir.direction));
  }
  return source;
}

ProtocolReport run_protocol(const ProtocolConfig& cfg, unsigned threads) {
  cfg.validate();
  const TwoQubitState state = effective_state(cfg.source, cfg.eve);
  const Sampler sampler = make_sampler(cfg.protocol, state);
  const CounterRng rng(cfg.seed);

  std::vector<RoundRecord> records(cfg.rounds);
  threads = std::max(1u, std::min<unsigned>(threads, 64));
  if (threads == 1) {
    simulate_range(sampler, rng, cfg.test_fraction, 0, cfg.rounds, records);
  } else {
    std::vector<std::jthread> workers;
    const std::uint64_t chunk = (cfg.rounds + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = std::min<std::uint64_t>(cfg.rounds, t * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(cfg.rounds, begin + chunk);
      workers.emplace_back([&, begin, end] { simulate_range(sampler, rng, cfg.test_fraction, begin, end, records); });
    }
  }

  ProtocolReport report;
  report.protocol = cfg.protocol;
  for (const auto& an : sampler.alice_names)
    for (const auto& bn : sampler.bob_names) report.rounds_used[an + bn] = 0;

  if (cfg.protocol == Protocol::E91) {
    const std::uint8_t flip = expected_sign(cfg.source, PauliAxis::Y) < 0 ? 1 : 0;
    static const SettingPair pairs[2][2] = {{SettingPair::A1B1, SettingPair::A1B3},
                                            {SettingPair::A3B1, SettingPair::A3B3}};
    for (const RoundRecord& rec : records) {
      ++report.rounds_used[sampler.alice_names[rec.alice] + sampler.bob_names[rec.bob]];
      if (rec.alice == 2 && rec.bob == 2) {
        report.sifted_key_a.push_back(alice_bit(rec.outcome));
        report.sifted_key_b.push_back(bob_bit(rec.outcome) ^ flip);
        ++report.key_rounds;
      } else if (rec.alice < 2 && rec.bob < 2) {
        ++report.tallies[pairs[rec.alice][rec.bob]].counts[rec.outcome];
        ++report.test_rounds;
      }
    }
    report.bound = std::numbers::sqrt2;
    report.exact_statistic = ekert_statistic(state);
  } else {
    const std::array<std::uint8_t, 2> flip = {
        static_cast<std::uint8_t>(expected_sign(cfg.source, PauliAxis::X) < 0 ? 1 : 0),
        static_cast<std::uint8_t>(expected_sign(cfg.source, PauliAxis::Z) < 0 ? 1 : 0)};
    static const SettingPair pairs[2] = {SettingPair::XX, SettingPair::ZZ};
    for (const RoundRecord& rec : records) {
      ++report.rounds_used[sampler.alice_names[rec.alice] + sampler.bob_names[rec.bob]];
      if (rec.alice != rec.bob) continue;
      if (rec.test) {
        ++report.tallies[pairs[rec.alice]].counts[rec.outcome];
        ++report.test_rounds;
      } else {
        report.sifted_key_a.push_back(alice_bit(rec.outcome));
        report.sifted_key_b.push_back(bob_bit(rec.outcome) ^ flip[rec.alice]);
        ++report.key_rounds;
      }
    }
    for (std::size_t basis = 0; basis < 2; ++basis) {
      const OutcomeTally& t = report.tallies[pairs[basis]];
      const double n = static_cast<double>(t.total());
      const double agree = static_cast<double>(t.counts[0] + t.counts[3]);
      const double disagree = static_cast<double>(t.counts[1] + t.counts[2]);
      const double q = n > 0 ? (flip[basis] ? agree : disagree) / n : 0.0;
      (basis == 0 ? report.test_qber_x : report.test_qber_z) = q;
    }
    report.bound = 1.0;
    report.exact_statistic = pair_correlator_sum(state, PairAxes::XX_ZZ);
  }

  const StatisticEstimate est = estimate_statistic(report.tallies, cfg.protocol);
  report.estimate = est.value;
  report.standard_error = est.standard_error;
  report.qber = qber(report.sifted_key_a, report.sifted_key_b);
  report.aborted = std::abs(report.estimate) - cfg.abort_sigma * report.standard_error <= report.bound;
  return report;
}

}  // namespace kslab
