#pragma once

#include <string>

#include "json.hpp"

#include "bqds/blockcp.hpp"
#include "bqds/lindblad.hpp"

namespace bqds {

// JSON forms: complex entries as [re, im], matrices as row arrays.

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

// {"n", "d", "convention": "heisenberg-kraus", "kraus", "choi"}; reading
// rebuilds the map from the Choi matrix.
nlohmann::json cpmap_to_json(const CpMap& phi);
CpMap cpmap_from_json(const nlohmann::json& j, double tol = 1e-9);

nlohmann::json generator_to_json(const BlockGenerator& gen);
BlockGenerator generator_from_json(const nlohmann::json& j);

nlohmann::json contraction_report_to_json(const ContractionReport& rep);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace bqds
