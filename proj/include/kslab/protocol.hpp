#pragma once

// Monte Carlo simulation of the entanglement-based E91 and BBM92 key
// distribution protocols, with an optional eavesdropper acting on the pair
// before it reaches the parties.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kslab/qstate.hpp"

namespace kslab {

enum class Protocol { E91, BBM92 };
const char* to_string(Protocol p);

struct NoEve {};

// Eve measures Bob's qubit and forwards the post-measurement eigenstate.
struct InterceptResend {
  enum class Policy { FixedZ, FixedX, RandomXZ, Direction };
  Policy policy = Policy::RandomXZ;
  Vec3 direction = Vec3::UnitZ();  // used by Policy::Direction, unit length

  static InterceptResend along(const Vec3& d) { return {Policy::Direction, d}; }
};

// Eve replaces the pair by a separable state of her choosing.
struct SeparableSubstitution {
  ProductEnsemble ensemble;
};

using EveStrategy = std::variant<NoEve, InterceptResend, SeparableSubstitution>;

struct ProtocolConfig {
  Protocol protocol = Protocol::E91;
  std::uint64_t rounds = 100000;
  // BBM92: fraction of matched-basis rounds spent on estimating T.
  double test_fraction = 0.1;
  TwoQubitState source = bell_density(BellLabel::PsiMinus);
  EveStrategy eve = NoEve{};
  std::uint64_t seed = 0;
  double abort_sigma = 3.0;

  // Throws InputError unless rounds >= 100, test_fraction in (0, 1),
  // test_fraction * rounds >= 30 and abort_sigma >= 0.
  void validate() const;
};

// Raw joint-outcome counts indexed ++, +-, -+, -- (Alice first, Bob before any
// convention flip).
struct OutcomeTally {
  std::array<std::uint64_t, 4> counts{};

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  double mean_product() const;
  OutcomeTally& operator+=(const OutcomeTally& other);
};

enum class SettingPair { A1B1, A1B3, A3B1, A3B3, XX, ZZ };
const char* to_string(SettingPair p);
using TallyMap = std::map<SettingPair, OutcomeTally>;

inline constexpr std::uint64_t kMinTestSamples = 30;

struct StatisticEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// E91 combines A1B1 - A1B3 + A3B1 + A3B3, BBM92 combines XX + ZZ. Each
// correlator is the empirical mean of outcome products with standard error
// sqrt((1 - m^2)/(n - 1)); errors are added in quadrature. Throws InputError
// naming the first required pair with fewer than 30 samples.
StatisticEstimate estimate_statistic(const TallyMap& tallies, Protocol protocol);

// Fraction of positions where the two keys disagree. Throws InputError on
// empty or unequal-length keys.
double qber(const std::vector<std::uint8_t>& key_a, const std::vector<std::uint8_t>& key_b);

TwoQubitState effective_state(const TwoQubitState& source, const EveStrategy& eve);

struct ProtocolReport {
  Protocol protocol = Protocol::E91;
  std::vector<std::uint8_t> sifted_key_a;
  std::vector<std::uint8_t> sifted_key_b;
  double qber = 0.0;
  // BBM92 only: error rates of the test sample per basis.
  std::optional<double> test_qber_x;
  std::optional<double> test_qber_z;
  double estimate = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  // Value of the statistic on the effective state; what the estimate targets.
  double exact_statistic = 0.0;
  bool aborted = false;
  // Rounds per setting pair, keyed "<alice><bob>" e.g. "a1b3", "akbk", "xz".
  std::map<std::string, std::uint64_t> rounds_used;
  std::uint64_t key_rounds = 0;
  std::uint64_t test_rounds = 0;
  TallyMap tallies;
};

// Deterministic for a given config; `threads` only changes how rounds are
// scheduled, never the result.
ProtocolReport run_protocol(const ProtocolConfig& cfg, unsigned threads = 1);

}  // namespace kslab
