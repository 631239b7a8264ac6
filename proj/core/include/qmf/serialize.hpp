// JSON serialization: kets and density matrices (split real/imag planes),
// and full model checkpoints.
#pragma once

#include <json.hpp>

#include "qmf/model.hpp"

namespace qmf {

/// {"moduli": [...], "args": [...]}
nlohmann::json ket_to_json(const Ket& k);
Ket ket_from_json(const nlohmann::json& j);

/// {"dims": [...], "re": [[...]], "im": [[...]]}
nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& j);

void save_model(const ModelParams& model, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace qmf
