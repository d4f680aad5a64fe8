#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "abcgof/core.hpp"
#include "abcgof/rejection.hpp"
#include "abcgof/rng.hpp"

namespace abcgof {

// Accepted parameters after local-linear regression adjustment, with the
// normalized Epanechnikov kernel weights of their rows.
struct PosteriorSample {
  Matrix params;                 // one row per accepted simulation
  std::vector<double> weights;   // sums to 1
  AcceptanceSet source;
  bool adjusted = false;         // false when a fallback skipped the regression
};

// Weighted least squares of each parameter on the standardized statistics
// (s_i - s) / scale of the accepted rows, with weights 1 - (d_i / d_max)^2.
// Adjusted values are theta_i - beta . (s_i - s) / scale.
//
// Requires at least p + k + 2 accepted rows (k = usable statistics). A
// rank-deficient design (relative tolerance 1e-10) falls back to the raw
// accepted parameters with a warning; d_max == 0 gives uniform weights and
// no adjustment.
PosteriorSample adjust_linear(const ReferenceTable& table,
                              const AcceptanceSet& accepted,
                              std::span<const double> observed,
                              const ScalingVector& scaling);

PosteriorSample adjust_linear(const ReferenceTable& table,
                              const AcceptanceSet& accepted,
                              const ObservedStats& observed,
                              const ScalingVector& scaling);

// Same computation on explicit accepted rows; accepted_params and
// accepted_stats are aligned with accepted.indices.
PosteriorSample adjust_linear(Matrix accepted_params,
                              const Matrix& accepted_stats,
                              const AcceptanceSet& accepted,
                              std::span<const double> observed,
                              const ScalingVector& scaling);

// `count` rows drawn with replacement, probability proportional to weight.
Matrix sample_posterior(const PosteriorSample& sample, std::size_t count,
                        Rng& rng);

}  // namespace abcgof
