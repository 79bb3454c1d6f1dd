#include "kslab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "kslab/cli/reports.hpp"
#include "kslab/errors.hpp"

namespace kslab::cli {

namespace {

struct GlobalOptions {
  std::string format = "json";
  std::uint64_t seed = 0;
  double tolerance = kDefaultVerdictTolerance;
};

struct StateOptions {
  std::string descriptor;
  std::optional<double> phi;
  std::optional<double> weight;

  StateArgs args() const { return {phi, weight}; }
};

void add_state_options(CLI::App* cmd, StateOptions& s, bool required, const std::string& default_state = "") {
  auto* opt = cmd->add_option("--state", s.descriptor,
                              "psi-plus|psi-minus|phi-plus|phi-minus|mixed|werner:<w>|phase:<phi>|ensemble:<file>|"
                              "matrix:<file>|<file>");
  if (required) opt->required();
  if (!default_state.empty()) s.descriptor = default_state;
  cmd->add_option("--phi", s.phi, "phase for --state phase");
  cmd->add_option("--weight", s.weight, "singlet weight for --state werner");
}

EveStrategy parse_eve(const std::string& name, const std::string& ensemble_path) {
  if (name == "none") return NoEve{};
  if (name == "intercept-z") return InterceptResend{InterceptResend::Policy::FixedZ, Vec3::UnitZ()};
  if (name == "intercept-x") return InterceptResend{InterceptResend::Policy::FixedX, Vec3::UnitX()};
  if (name == "intercept-xz") return InterceptResend{InterceptResend::Policy::RandomXZ, Vec3::UnitZ()};
  if (name.rfind("intercept-dir:", 0) == 0) {
    std::stringstream ss(name.substr(std::string("intercept-dir:").size()));
    std::vector<double> v;
    for (std::string part; std::getline(ss, part, ',');) {
      try {
        v.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw InputError("intercept direction component '" + part + "' is not a number");
      }
    }
    if (v.size() != 3) throw InputError("intercept-dir needs three comma-separated components");
    const Vec3 d(v[0], v[1], v[2]);
    if (!(d.norm() > 0.0) || !d.allFinite()) throw InputError("intercept direction must be non-zero");
    return InterceptResend::along(d.normalized());
  }
  if (name == "substitute") {
    if (ensemble_path.empty()) throw InputError("--eve substitute needs --ensemble <file>");
    return SeparableSubstitution{read_ensemble_file(ensemble_path)};
  }
  throw InputError("unknown eavesdropper strategy '" + name + "'");
}

void emit(const Json& doc, const GlobalOptions& g, std::ostream& out) {
  try {
    validate_report(doc);
  } catch (const InputError& e) {
    throw InvariantError(std::string("emitted report fails its schema: ") + e.what());
  }
  if (g.format == "json") {
    out << render_json(doc);
  } else if (g.format == "csv") {
    out << render_csv(doc);
  } else {
    out << render_plain(doc);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-qubit witness, hidden-variable and QKD simulation toolkit", "kslab"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv", "plain"}));
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--tolerance", g.tolerance, "violation tolerance")->check(CLI::NonNegativeNumber);

  StateOptions witness_state;
  auto* witness = app.add_subcommand("witness", "evaluate every witness functional on a state");
  add_state_options(witness, witness_state, true);

  StateOptions ks_state;
  bool ks_bounds = false;
  bool ks_assignments = false;
  auto* ks = app.add_subcommand("ks", "product-rule assignments, classical bounds, and state functionals");
  ks->add_flag("--bounds", ks_bounds, "report classical bounds (always included)");
  ks->add_flag("--assignments", ks_assignments, "list all 64 assignments");
  add_state_options(ks, ks_state, false);

  std::vector<double> fine_correlators;
  std::vector<double> fine_marginals;
  auto* fine = app.add_subcommand("fine", "CHSH panel and local model for four correlators c11 c13 c31 c33");
  fine->add_option("correlators", fine_correlators, "c11 c13 c31 c33")->expected(4)->required();
  fine->add_option("--marginals", fine_marginals, "alice1 alice3 bob1 bob3")->expected(4);

  std::string bound_id;
  BoundSearchOptions bound_opts;
  auto* bound = app.add_subcommand("bound", "maximise a functional over product states");
  bound->add_option("functional", bound_id, "ekert-s|bbm-t|ks-i|ks-ii|ks-iii")
      ->required()
      ->check(CLI::IsMember({"ekert-s", "bbm-t", "ks-i", "ks-ii", "ks-iii"}));
  bound->add_option("--polar-steps", bound_opts.polar_steps)->check(CLI::Range(2, 4096));
  bound->add_option("--azimuth-steps", bound_opts.azimuth_steps)->check(CLI::Range(1, 4096));
  bound->add_option("--min-step", bound_opts.min_step)->check(CLI::PositiveNumber);
  bound->add_option("--starts", bound_opts.refine_starts)->check(CLI::Range(1, 1024));

  std::string qkd_protocol = "e91";
  StateOptions qkd_state;
  std::string qkd_eve = "none";
  std::string qkd_ensemble;
  std::uint64_t qkd_rounds = 100000;
  double qkd_test_fraction = 0.1;
  double qkd_abort_sigma = 3.0;
  unsigned qkd_threads = 1;
  bool qkd_omit_keys = false;
  auto* qkd = app.add_subcommand("qkd", "simulate an E91 or BBM92 run");
  qkd->add_option("--protocol", qkd_protocol)->check(CLI::IsMember({"e91", "bbm92"}));
  add_state_options(qkd, qkd_state, false, "psi-minus");
  qkd->add_option("--eve", qkd_eve, "none|intercept-z|intercept-x|intercept-xz|intercept-dir:x,y,z|substitute");
  qkd->add_option("--ensemble", qkd_ensemble, "ensemble file for --eve substitute");
  qkd->add_option("--rounds", qkd_rounds);
  qkd->add_option("--test-fraction", qkd_test_fraction);
  qkd->add_option("--abort-sigma", qkd_abort_sigma);
  qkd->add_option("--threads", qkd_threads)->check(CLI::Range(1u, 64u));
  qkd->add_flag("--omit-keys", qkd_omit_keys, "leave sifted key strings out of the report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  try {
    if (g.format == "csv" && (ks->parsed() || fine->parsed() || qkd->parsed())) {
      throw InputError("CSV output is only available for witness and bound reports");
    }
    if (witness->parsed()) {
      const TwoQubitState rho = resolve_state(witness_state.descriptor, witness_state.args());
      emit(witness_report(witness_state.descriptor, rho, g.tolerance), g, out);
    } else if (ks->parsed()) {
      KsReportOptions o;
      o.include_assignments = ks_assignments;
      o.tolerance = g.tolerance;
      if (!ks_state.descriptor.empty()) {
        o.descriptor = ks_state.descriptor;
        o.state = resolve_state(ks_state.descriptor, ks_state.args());
      }
      emit(ks_report(o), g, out);
    } else if (fine->parsed()) {
      CorrelatorQuad q{fine_correlators[0], fine_correlators[1], fine_correlators[2], fine_correlators[3]};
      if (!fine_marginals.empty()) {
        q.alice1 = fine_marginals[0];
        q.alice3 = fine_marginals[1];
        q.bob1 = fine_marginals[2];
        q.bob3 = fine_marginals[3];
      }
      q.validate();
      emit(fine_report(q, g.tolerance), g, out);
    } else if (bound->parsed()) {
      const BoundReport r = separable_bound(*parse_functional_id(bound_id), bound_opts);
      const Json doc = bound_report(r);
      emit(doc, g, out);
      if (!doc["withinBound"].get<bool>()) {
        err << "error: supremum " << r.supremum << " exceeds the analytic bound " << r.analytic_bound << "\n";
        return kExitInternal;
      }
    } else if (qkd->parsed()) {
      ProtocolConfig cfg;
      cfg.protocol = qkd_protocol == "bbm92" ? Protocol::BBM92 : Protocol::E91;
      cfg.rounds = qkd_rounds;
      cfg.test_fraction = qkd_test_fraction;
      cfg.source = resolve_state(qkd_state.descriptor, qkd_state.args());
      cfg.eve = parse_eve(qkd_eve, qkd_ensemble);
      cfg.seed = g.seed;
      cfg.abort_sigma = qkd_abort_sigma;
      const ProtocolReport r = run_protocol(cfg, qkd_threads);
      QkdReportContext ctx{qkd_state.descriptor, qkd_eve, cfg.rounds, cfg.seed, cfg.test_fraction, cfg.abort_sigma,
                           !qkd_omit_keys};
      emit(qkd_report(r, ctx), g, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace kslab::cli
