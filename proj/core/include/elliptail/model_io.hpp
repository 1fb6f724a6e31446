#pragma once

#include <filesystem>
#include <string>

#include "elliptail/radial_model.hpp"

namespace elliptail {

/// JSON model descriptor:
///   {"family": "kotz", "C": .., "N": .., "c": .., "delta": .., ["kappa"], ["validity_radius"], ["label"]}
///   {"family": "tail_equiv", "base": {...}, "a": .., "gamma": .., "tau": .., ["kappa"], ["validity_radius"], ["label"]}
///   {"family": "mixture", "components": [{"weight": .., "model": {...}}, ...], ["label"]}
/// Custom models have no descriptor and raise ModelError.
std::string model_to_json(const RadialModel& model, int indent = 2);
RadialModel model_from_json(const std::string& text);

RadialModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const RadialModel& model);

}  // namespace elliptail
