#pragma once

#include <json.hpp>

#include "abcgof/gof.hpp"
#include "abcgof/harness.hpp"
#include "abcgof/pca.hpp"
#include "abcgof/ppc.hpp"

namespace abcgof {

// Fields: kind, observed_D, p_value, p_value_conservative, M,
// acceptance_rate, n_prime (null for D_prior), seed, null_values.
nlohmann::ordered_json to_json(const GofResult& result);

nlohmann::ordered_json to_json(const PpcReport& report);

nlohmann::ordered_json to_json(const PcaProjection& projection,
                               const Envelope& envelope,
                               const Point2& observed_score);

nlohmann::ordered_json to_json(const PowerStudyConfig& config);
nlohmann::ordered_json to_json(const PowerStudyResult& result);

}  // namespace abcgof
