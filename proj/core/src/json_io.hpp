#pragma once

#include <json.hpp>

#include "iriscs/iris.hpp"
#include "iriscs/recon.hpp"

// nlohmann adapters shared by the translation units that emit JSON. Not
// installed; the public headers only expose string serializers.
namespace iriscs {

void to_json(nlohmann::json& j, const SolverConfig& cfg);
void to_json(nlohmann::json& j, const ReconReport& report);
void to_json(nlohmann::json& j, const IrisGeometry& geo);
void to_json(nlohmann::json& j, const LocalizerConfig& cfg);
void to_json(nlohmann::json& j, const GaborBank& bank);
void to_json(nlohmann::json& j, const IrisPipelineConfig& cfg);

/// Non-finite doubles become the strings "inf", "-inf" or "nan" so documents stay valid JSON.
nlohmann::json number_or_tag(double v);

}  // namespace iriscs
