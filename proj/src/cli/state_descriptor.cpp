#include "kslab/cli/state_descriptor.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "kslab/errors.hpp"

namespace kslab::cli {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError(what + " is not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw InputError(what + " is not a finite number: '" + text + "'");
  return v;
}

double number_field(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + " must be a number");
  return j.get<double>();
}

Vec3 vec3_field(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw InputError(where + " must be an array of three numbers");
  return {number_field(j[0], where + "[0]"), number_field(j[1], where + "[1]"), number_field(j[2], where + "[2]")};
}

bool looks_like_matrix(const Json& doc) {
  return doc.is_array() && doc.size() == 4 && doc[0].is_array() && !doc[0].empty() && doc[0][0].is_array();
}

}  // namespace

ProductEnsemble ensemble_from_json(const Json& doc) {
  if (!doc.is_array()) throw InputError("ensemble file must be a JSON array of terms");
  static const std::set<std::string> allowed = {"weight", "blochA", "blochB"};
  std::vector<ProductTerm> terms;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const Json& t = doc[i];
    const std::string where = "ensemble[" + std::to_string(i) + "]";
    if (!t.is_object()) throw InputError(where + " must be an object");
    for (const auto& [key, _] : t.items()) {
      if (!allowed.contains(key)) throw InputError(where + " has unknown field '" + key + "'");
    }
    for (const char* key : {"weight", "blochA", "blochB"}) {
      if (!t.contains(key)) throw InputError(where + " is missing field '" + std::string(key) + "'");
    }
    terms.push_back({number_field(t["weight"], where + ".weight"), vec3_field(t["blochA"], where + ".blochA"),
                     vec3_field(t["blochB"], where + ".blochB")});
  }
  return ProductEnsemble(std::move(terms));
}

Json ensemble_to_json(const ProductEnsemble& e) {
  Json out = Json::array();
  for (const auto& t : e.terms()) {
    out.push_back({{"weight", t.weight},
                   {"blochA", {t.bloch_a.x(), t.bloch_a.y(), t.bloch_a.z()}},
                   {"blochB", {t.bloch_b.x(), t.bloch_b.y(), t.bloch_b.z()}}});
  }
  return out;
}

TwoQubitState matrix_from_json(const Json& doc) {
  if (!doc.is_array() || doc.size() != 4) throw InputError("state matrix must be a 4x4 array");
  Matrix4 m;
  for (int r = 0; r < 4; ++r) {
    const Json& row = doc[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 4) throw InputError("state matrix row " + std::to_string(r) + " must have 4 entries");
    for (int c = 0; c < 4; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      const std::string where = "matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) throw InputError(where + " must be a [re, im] pair");
      m(r, c) = Complex(number_field(e[0], where), number_field(e[1], where));
    }
  }
  return TwoQubitState(m);
}

Json matrix_to_json(const TwoQubitState& rho) {
  Json out = Json::array();
  for (int r = 0; r < 4; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 4; ++c) row.push_back({rho(r, c).real(), rho(r, c).imag()});
    out.push_back(row);
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

ProductEnsemble read_ensemble_file(const std::string& path) { return ensemble_from_json(read_json_file(path)); }

TwoQubitState resolve_state(const std::string& descriptor, const StateArgs& args) {
  if (descriptor == "psi-plus") return bell_density(BellLabel::PsiPlus);
  if (descriptor == "psi-minus") return bell_density(BellLabel::PsiMinus);
  if (descriptor == "phi-plus") return bell_density(BellLabel::PhiPlus);
  if (descriptor == "phi-minus") return bell_density(BellLabel::PhiMinus);
  if (descriptor == "mixed") return maximally_mixed();

  const auto colon = descriptor.find(':');
  const std::string head = descriptor.substr(0, colon);
  const std::string tail = colon == std::string::npos ? std::string() : descriptor.substr(colon + 1);

  if (head == "werner") {
    if (colon != std::string::npos) return werner_state(parse_number(tail, "Werner weight"));
    if (!args.werner_weight) throw InputError("state 'werner' needs a weight (werner:<w> or --weight)");
    return werner_state(*args.werner_weight);
  }
  if (head == "phase") {
    if (colon != std::string::npos) return phase_epr_density(parse_number(tail, "phase"));
    if (!args.phase) throw InputError("state 'phase' needs a phase (phase:<phi> or --phi)");
    return phase_epr_density(*args.phase);
  }
  if (head == "ensemble" && colon != std::string::npos) return product_mixture(read_ensemble_file(tail));
  if (head == "matrix" && colon != std::string::npos) return matrix_from_json(read_json_file(tail));

  if (std::filesystem::is_regular_file(descriptor)) {
    const Json doc = read_json_file(descriptor);
    return looks_like_matrix(doc) ? matrix_from_json(doc) : product_mixture(ensemble_from_json(doc));
  }
  throw InputError("unknown state descriptor '" + descriptor + "'");
}

}  // namespace kslab::cli
