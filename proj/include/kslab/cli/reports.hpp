#pragma once

// JSON report documents emitted by the command-line tool, their schema
// checks, and the flat CSV / plain renderings.

#include <string>

#include "kslab/cli/state_descriptor.hpp"
#include "kslab/hidden_variables.hpp"
#include "kslab/protocol.hpp"
#include "kslab/witnesses.hpp"

namespace kslab::cli {

Json witness_report(const std::string& descriptor, const TwoQubitState& rho, double tolerance);

struct KsReportOptions {
  bool include_assignments = false;
  std::optional<std::string> descriptor;
  std::optional<TwoQubitState> state;
  double tolerance = kDefaultVerdictTolerance;
};
Json ks_report(const KsReportOptions& opts);

Json fine_report(const CorrelatorQuad& quad, double tolerance);

Json bound_report(const BoundReport& r);

struct QkdReportContext {
  std::string source;
  std::string eve;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  double abort_sigma = 0.0;
  bool include_keys = true;
};
Json qkd_report(const ProtocolReport& r, const QkdReportContext& ctx);

// Throws InputError naming the first missing or mistyped field. Dispatches on
// the document's "report" key.
void validate_report(const Json& doc);

// True for report kinds that have a flat CSV form (witness, bound).
bool has_csv_form(const Json& doc);
std::string render_csv(const Json& doc);
std::string render_plain(const Json& doc);
std::string render_json(const Json& doc);

}  // namespace kslab::cli
