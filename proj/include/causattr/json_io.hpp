#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "causattr/attribution.hpp"
#include "causattr/bootstrap.hpp"
#include "causattr/bounds.hpp"
#include "causattr/em.hpp"

namespace causattr {

inline constexpr const char* kSchemaVersion = "1.0";

nlohmann::ordered_json to_json(const IntervalBounds& b);
nlohmann::ordered_json to_json(const ClassDistribution& d);
nlohmann::ordered_json to_json(const std::map<std::string, double>& values);
nlohmann::ordered_json to_json(const MixtureModelParams& params);
nlohmann::ordered_json to_json(const FitResult& fit);
nlohmann::ordered_json to_json(const BootstrapResult& r);
nlohmann::ordered_json crossings_json(const PosteriorCurve& curve);

// Inverse of to_json(FitResult); throws InputError on malformed input.
FitResult fit_from_json(const nlohmann::json& j);
FitResult read_fit_file(const std::string& path);

// {"0001": {"z": 0.5, "m": 0.5}, ...}
AttributionMatrix attribution_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AttributionMatrix& a);

}  // namespace causattr
