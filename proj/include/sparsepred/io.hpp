#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sparsepred/predictive.hpp"
#include "sparsepred/risk.hpp"

namespace sparsepred::io {

// %.17g, or "inf"/"-inf"/"nan".
std::string format_double(double x);

// Serializes with every float at 17 significant digits; non-finite floats
// become null.  Object keys keep insertion order only if the caller uses
// ordered_json.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

nlohmann::ordered_json prior_to_json(const DiscretePriord& prior);
DiscretePriord prior_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json mixture_to_json(const GaussianMixtured& mix);
GaussianMixtured mixture_from_json(const nlohmann::ordered_json& j);

// CSV with header theta,risk,benchmark.
std::string profile_to_csv(const RiskProfiled& profile);
RiskProfiled profile_from_csv(const std::string& text);

// Sidecar for plotting: constants, sup location and the non-origin support points.
nlohmann::ordered_json profile_sidecar(const RiskProfiled& profile, const ModelParamsd& p,
                                       const std::vector<double>& support_points);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace sparsepred::io
