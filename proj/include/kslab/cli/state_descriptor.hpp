#pragma once

// Textual state descriptors and the two JSON state file formats.
//
//   psi-plus | psi-minus | phi-plus | phi-minus | mixed
//   werner:<w>          werner  (with an explicit weight argument)
//   phase:<phi>         phase   (with an explicit phase argument)
//   ensemble:<path>     JSON array of {weight, blochA: [x,y,z], blochB: [x,y,z]}
//   matrix:<path>       JSON 4x4 array of [re, im] pairs, row-major
//   <path>              either file format, detected from its shape

#include <optional>
#include <string>

#include "json.hpp"
#include "kslab/qstate.hpp"

namespace kslab::cli {

using Json = nlohmann::ordered_json;

struct StateArgs {
  std::optional<double> phase;
  std::optional<double> werner_weight;
};

// Throws InputError with a message naming the offending field or invariant.
TwoQubitState resolve_state(const std::string& descriptor, const StateArgs& args = {});

ProductEnsemble ensemble_from_json(const Json& doc);
Json ensemble_to_json(const ProductEnsemble& e);

TwoQubitState matrix_from_json(const Json& doc);
Json matrix_to_json(const TwoQubitState& rho);

Json read_json_file(const std::string& path);
ProductEnsemble read_ensemble_file(const std::string& path);

}  // namespace kslab::cli
