#include "kslab/cli/reports.hpp"

#include <set>
#include <sstream>
#include <vector>

#include "kslab/errors.hpp"

namespace kslab::cli {

namespace {

// -0.0 prints as "-0.0"; collapse it so equal values render identically.
double num(double v) { return v == 0.0 ? 0.0 : v; }

Json vec_json(const Vec3& v) { return Json::array({num(v.x()), num(v.y()), num(v.z())}); }

Json verdict_json(const WitnessVerdict& v) {
  return {{"value", num(v.statistic)}, {"bound", num(v.bound)}, {"violated", v.violated}, {"margin", num(v.margin)}};
}

Json quad_json(const CorrelatorQuad& q) {
  return {{"c11", num(q.c11)},       {"c13", num(q.c13)},       {"c31", num(q.c31)},   {"c33", num(q.c33)},
          {"alice1", num(q.alice1)}, {"alice3", num(q.alice3)}, {"bob1", num(q.bob1)}, {"bob3", num(q.bob3)}};
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
  return s;
}

enum class Kind { Number, Bool, String, Object, Array, StringOrNull, ArrayOrNull };

struct Field {
  const char* pointer;
  Kind kind;
  bool required = true;
};

bool matches(const Json& j, Kind k) {
  switch (k) {
    case Kind::Number: return j.is_number();
    case Kind::Bool: return j.is_boolean();
    case Kind::String: return j.is_string();
    case Kind::Object: return j.is_object();
    case Kind::Array: return j.is_array();
    case Kind::StringOrNull: return j.is_string() || j.is_null();
    case Kind::ArrayOrNull: return j.is_array() || j.is_null();
  }
  return false;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Number: return "number";
    case Kind::Bool: return "boolean";
    case Kind::String: return "string";
    case Kind::Object: return "object";
    case Kind::Array: return "array";
    case Kind::StringOrNull: return "string or null";
    case Kind::ArrayOrNull: return "array or null";
  }
  return "?";
}

const std::vector<Field>& schema_for(const std::string& report) {
  static const std::vector<Field> witness = {
      {"/report", Kind::String},
      {"/state", Kind::String},
      {"/S", Kind::Number},
      {"/T", Kind::Number},
      {"/U1", Kind::Number},
      {"/U2", Kind::Number},
      {"/U3", Kind::Number},
      {"/xxPlusYy", Kind::Number},
      {"/fidelities", Kind::Object},
      {"/fidelities/phiPlus", Kind::Number},
      {"/fidelities/phiMinus", Kind::Number},
      {"/fidelities/psiPlus", Kind::Number},
      {"/fidelities/psiMinus", Kind::Number},
      {"/ekertViolated", Kind::Bool},
      {"/bbmViolated", Kind::Bool},
      {"/ksViolated", Kind::Object},
      {"/ksViolated/caseI", Kind::Bool},
      {"/ksViolated/caseII", Kind::Bool},
      {"/ksViolated/caseIII", Kind::Bool},
      {"/distillable", Kind::Bool},
      {"/distillableBellState", Kind::StringOrNull},
      {"/identityResiduals", Kind::Object},
      {"/identityResiduals/xxYy", Kind::Number},
      {"/identityResiduals/xxZz", Kind::Number},
      {"/tolerance", Kind::Number},
  };
  static const std::vector<Field> ks = {
      {"/report", Kind::String},
      {"/bounds", Kind::Object},
      {"/bounds/caseI", Kind::Number},
      {"/bounds/caseII", Kind::Number},
      {"/bounds/caseIII", Kind::Number},
      {"/valueSets", Kind::Object},
      {"/assignmentCount", Kind::Number},
      {"/assignments", Kind::Array, false},
      {"/state", Kind::String, false},
      {"/functionals", Kind::Object, false},
  };
  static const std::vector<Field> fine = {
      {"/report", Kind::String},   {"/quad", Kind::Object},      {"/panel", Kind::Array},
      {"/panelMax", Kind::Number}, {"/chshLocal", Kind::Bool},   {"/feasible", Kind::Bool},
      {"/weights", Kind::ArrayOrNull}, {"/tolerance", Kind::Number},
  };
  static const std::vector<Field> bound = {
      {"/report", Kind::String},
      {"/functionalId", Kind::String},
      {"/supremumFound", Kind::Number},
      {"/analyticBound", Kind::Number},
      {"/withinBound", Kind::Bool},
      {"/argmax", Kind::Object},
      {"/argmax/weight", Kind::Number},
      {"/argmax/blochA", Kind::Array},
      {"/argmax/blochB", Kind::Array},
      {"/evaluations", Kind::Number},
      {"/refineEvaluations", Kind::Number},
  };
  static const std::vector<Field> qkd = {
      {"/report", Kind::String},
      {"/protocol", Kind::String},
      {"/source", Kind::String},
      {"/eve", Kind::String},
      {"/rounds", Kind::Number},
      {"/seed", Kind::Number},
      {"/testFraction", Kind::Number},
      {"/abortSigma", Kind::Number},
      {"/siftedKeyLength", Kind::Number},
      {"/siftedKeyA", Kind::String, false},
      {"/siftedKeyB", Kind::String, false},
      {"/qber", Kind::Number},
      {"/qberByBasis", Kind::Object, false},
      {"/statisticEstimate", Kind::Number},
      {"/statisticStderr", Kind::Number},
      {"/bound", Kind::Number},
      {"/exactStatistic", Kind::Number},
      {"/aborted", Kind::Bool},
      {"/roundsUsed", Kind::Object},
      {"/keyRounds", Kind::Number},
      {"/testRounds", Kind::Number},
  };
  if (report == "witness") return witness;
  if (report == "ks") return ks;
  if (report == "fine") return fine;
  if (report == "bound") return bound;
  if (report == "qkd") return qkd;
  throw InputError("unknown report kind '" + report + "'");
}

std::string scalar_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out,
             bool expand_arrays) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out, expand_arrays);
  } else if (j.is_array() && expand_arrays) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out, expand_arrays);
  } else {
    out.emplace_back(prefix, scalar_text(j));
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

Json witness_report(const std::string& descriptor, const TwoQubitState& rho, double tolerance) {
  const WitnessVerdict ekert = ekert_verdict(rho, EkertSettings::standard(), tolerance);
  const WitnessVerdict bbm = bbm_verdict(rho, tolerance);
  const BellFidelities f = bell_fidelities(rho);
  const IdentityResiduals res = fidelity_identities_check(rho);
  const DistillabilityVerdict dist = distillable_witness(rho, tolerance);

  Json doc;
  doc["report"] = "witness";
  doc["state"] = descriptor;
  doc["S"] = num(ekert.statistic);
  doc["T"] = num(bbm.statistic);
  doc["U1"] = num(ks_functional(rho, KSCase::CaseI));
  doc["U2"] = num(ks_functional(rho, KSCase::CaseII));
  doc["U3"] = num(ks_functional(rho, KSCase::CaseIII));
  doc["xxPlusYy"] = num(pair_correlator_sum(rho, PairAxes::XX_YY));
  doc["fidelities"] = {{"phiPlus", num(f.phi_plus)},
                       {"phiMinus", num(f.phi_minus)},
                       {"psiPlus", num(f.psi_plus)},
                       {"psiMinus", num(f.psi_minus)}};
  doc["ekertViolated"] = ekert.violated;
  doc["bbmViolated"] = bbm.violated;
  Json ks = Json::object();
  for (KSCase c : kKSCases) ks[to_string(c)] = ks_verdict(rho, c, tolerance).violated;
  doc["ksViolated"] = ks;
  doc["distillable"] = dist.distillable();
  doc["distillableBellState"] = dist.bell ? Json(to_string(*dist.bell)) : Json(nullptr);
  doc["identityResiduals"] = {{"xxYy", num(res.xx_yy)}, {"xxZz", num(res.xx_zz)}};
  doc["tolerance"] = tolerance;
  return doc;
}

Json ks_report(const KsReportOptions& opts) {
  const std::vector<KSAssignment> all = enumerate_ks_assignments();
  Json doc;
  doc["report"] = "ks";
  Json bounds = Json::object();
  Json value_sets = Json::object();
  for (KSCase c : kKSCases) {
    bounds[to_string(c)] = ks_classical_bound(c);
    std::set<int> values;
    for (const auto& a : all) values.insert(ks_functional_value(a, c));
    value_sets[to_string(c)] = Json(std::vector<int>(values.begin(), values.end()));
  }
  doc["bounds"] = bounds;
  doc["valueSets"] = value_sets;
  doc["assignmentCount"] = all.size();
  if (opts.include_assignments) {
    Json list = Json::array();
    for (const auto& a : all) {
      Json singles = Json::object();
      for (std::size_t k = 0; k < kSingleObservables; ++k) singles[to_string(static_cast<SingleObservable>(k))] = a.single[k];
      Json products = Json::object();
      for (std::size_t k = 0; k < kProductObservables; ++k)
        products[to_string(static_cast<ProductObservable>(k))] = a.product[k];
      Json values = Json::object();
      for (KSCase c : kKSCases) values[to_string(c)] = ks_functional_value(a, c);
      list.push_back({{"singles", singles}, {"products", products}, {"values", values}});
    }
    doc["assignments"] = list;
  }
  if (opts.state) {
    doc["state"] = opts.descriptor.value_or("");
    Json funcs = Json::object();
    for (KSCase c : kKSCases) funcs[to_string(c)] = verdict_json(ks_verdict(*opts.state, c, opts.tolerance));
    doc["functionals"] = funcs;
  }
  return doc;
}

Json fine_report(const CorrelatorQuad& quad, double tolerance) {
  const ChshPanel panel = chsh_panel(quad, tolerance);
  const std::optional<LocalModel> model = fine_local_model(quad);
  Json doc;
  doc["report"] = "fine";
  doc["quad"] = quad_json(quad);
  Json values = Json::array();
  for (double v : panel.values) values.push_back(num(v));
  doc["panel"] = values;
  doc["panelMax"] = num(panel.max_value());
  doc["chshLocal"] = panel.local;
  doc["feasible"] = model.has_value();
  if (model) {
    Json w = Json::array();
    for (double v : model->weights) w.push_back(num(v));
    doc["weights"] = w;
  } else {
    doc["weights"] = nullptr;
  }
  doc["tolerance"] = tolerance;
  return doc;
}

Json bound_report(const BoundReport& r) {
  Json doc;
  doc["report"] = "bound";
  doc["functionalId"] = to_string(r.id);
  doc["supremumFound"] = num(r.supremum);
  doc["analyticBound"] = r.analytic_bound;
  doc["withinBound"] = r.supremum <= r.analytic_bound + 1e-6;
  doc["argmax"] = {{"weight", r.argmax.weight}, {"blochA", vec_json(r.argmax.bloch_a)}, {"blochB", vec_json(r.argmax.bloch_b)}};
  doc["evaluations"] = r.evaluations;
  doc["refineEvaluations"] = r.refine_evaluations;
  return doc;
}

Json qkd_report(const ProtocolReport& r, const QkdReportContext& ctx) {
  Json doc;
  doc["report"] = "qkd";
  doc["protocol"] = to_string(r.protocol);
  doc["source"] = ctx.source;
  doc["eve"] = ctx.eve;
  doc["rounds"] = ctx.rounds;
  doc["seed"] = ctx.seed;
  doc["testFraction"] = ctx.test_fraction;
  doc["abortSigma"] = ctx.abort_sigma;
  doc["siftedKeyLength"] = r.sifted_key_a.size();
  if (ctx.include_keys) {
    doc["siftedKeyA"] = bits_string(r.sifted_key_a);
    doc["siftedKeyB"] = bits_string(r.sifted_key_b);
  }
  doc["qber"] = num(r.qber);
  if (r.test_qber_x && r.test_qber_z) doc["qberByBasis"] = {{"x", num(*r.test_qber_x)}, {"z", num(*r.test_qber_z)}};
  doc["statisticEstimate"] = num(r.estimate);
  doc["statisticStderr"] = num(r.standard_error);
  doc["bound"] = r.bound;
  doc["exactStatistic"] = num(r.exact_statistic);
  doc["aborted"] = r.aborted;
  Json used = Json::object();
  for (const auto& [k, v] : r.rounds_used) used[k] = v;
  doc["roundsUsed"] = used;
  doc["keyRounds"] = r.key_rounds;
  doc["testRounds"] = r.test_rounds;
  return doc;
}

void validate_report(const Json& doc) {
  if (!doc.is_object() || !doc.contains("report") || !doc["report"].is_string()) {
    throw InputError("report document must be an object with a string 'report' field");
  }
  const auto& fields = schema_for(doc["report"].get<std::string>());
  std::set<std::string> top_level;
  for (const Field& f : fields) {
    const Json::json_pointer ptr(f.pointer);
    std::string p = f.pointer;
    if (p.find('/', 1) == std::string::npos) top_level.insert(p.substr(1));
    if (!doc.contains(ptr)) {
      if (f.required) throw InputError(std::string("report is missing field ") + f.pointer);
      continue;
    }
    if (!matches(doc.at(ptr), f.kind)) {
      throw InputError(std::string("report field ") + f.pointer + " must be " + kind_name(f.kind));
    }
  }
  for (const auto& [k, _] : doc.items()) {
    if (!top_level.contains(k)) throw InputError("report has unknown field '" + k + "'");
  }
}

bool has_csv_form(const Json& doc) {
  const std::string kind = doc.value("report", "");
  return kind == "witness" || kind == "bound";
}

std::string render_csv(const Json& doc) {
  if (!has_csv_form(doc)) throw InputError("CSV output is only available for witness and bound reports");
  std::vector<std::pair<std::string, std::string>> cells;
  flatten(doc, "", cells, true);
  std::ostringstream os;
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_cell(cells[i].first);
  os << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_cell(cells[i].second);
  os << "\n";
  return os.str();
}

std::string render_plain(const Json& doc) {
  std::vector<std::pair<std::string, std::string>> cells;
  flatten(doc, "", cells, false);
  std::ostringstream os;
  for (const auto& [k, v] : cells) os << k << ": " << v << "\n";
  return os.str();
}

std::string render_json(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace kslab::cli
