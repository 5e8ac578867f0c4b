#pragma once

#include <string>

#include "qincompat/model.hpp"

namespace qincompat::config {

// JSON model description: complex numbers as [re, im] pairs, matrices row-major.
//
// {
//   "dimension": 2,
//   "parameters": 2,
//   "generators": [ [[[0,0],[0,-1]], [[0,1],[0,0]]], ... ],
//   "probe": {"pure": [[1,0],[0,0]]}          (or {"mixed": <matrix>})
//   "theta": [0.0, 0.0],
//   "noise": {"kind": "global-depolarizing", "lambda": 0.5}
// }
//
// For local-depolarizing noise the generators are given per site (qubit sized)
// and are lifted to one copy per site; "dimension" stays the total dimension.

model::StatisticalModel parse_model(const std::string& json_text);
model::StatisticalModel load_model_file(const std::string& path);

std::string serialize_model(const model::StatisticalModel& m, int indent = 2);
void write_model_file(const model::StatisticalModel& m, const std::string& path);

// Generator-only file for the design subcommand: {"dimension": D, "generators": [...]}.
model::GeneratorSet load_generators_file(const std::string& path);

// Orthonormal state list for the basis-product design: {"states": [vector, ...]}.
std::vector<ComplexVector> load_states_file(const std::string& path);

}  // namespace qincompat::config
