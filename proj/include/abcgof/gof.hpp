#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abcgof/adjust.hpp"
#include "abcgof/core.hpp"
#include "abcgof/rejection.hpp"
#include "abcgof/simulator.hpp"

namespace abcgof {

enum class StatisticKind { prior, post };

const char* to_string(StatisticKind kind);

struct GofSettings {
  double acceptance_rate = 0.01;
  std::size_t M = 0;
  std::optional<std::size_t> n_prime;  // set for D_post only
  std::uint64_t seed = 0;
};

struct GofResult {
  StatisticKind kind = StatisticKind::prior;
  double observed_value = 0.0;
  std::vector<double> null_values;
  double p_value = 1.0;
  GofSettings settings;

  // (1 + #{null >= observed}) / (1 + M). Informational only; the test uses
  // p_value.
  double p_value_conservative() const;
};

// P = (1/M) * #{j : nulls[j] >= observed}.
double p_value(double observed, std::span<const double> nulls);
double p_value_conservative(double observed, std::span<const double> nulls);

// ----------------------------------------------------------------------------
// D_prior: mean distance from the observed statistics to the accepted
// simulations.

double d_prior(const ReferenceTable& table, std::span<const double> observed,
               const ScalingVector& scaling, double rate,
               std::optional<std::size_t> exclude = std::nullopt);
double d_prior(const ReferenceTable& table, const ObservedStats& observed,
               const ScalingVector& scaling, double rate,
               std::optional<std::size_t> exclude = std::nullopt);

// M distinct table rows chosen as pseudo-observed data, from stream
// (seed, pseudo_observed). M == n returns every row in index order.
std::vector<std::size_t> pseudo_observed_rows(std::size_t n, std::size_t M,
                                              std::uint64_t seed);

// Leave-one-out D_prior of each listed row against the remaining n - 1 rows,
// with the global scaling.
std::vector<double> leave_one_out_prior(const ReferenceTable& table,
                                        const ScalingVector& scaling,
                                        double rate,
                                        std::span<const std::size_t> rows,
                                        int threads = 1);

// Null distribution of D_prior from M pseudo-observed rows.
std::vector<double> null_distribution_prior(const ReferenceTable& table,
                                            const ScalingVector& scaling,
                                            double rate, std::size_t M,
                                            std::uint64_t seed,
                                            int threads = 1);

GofResult gfit(const ReferenceTable& table, const ObservedStats& observed,
               double rate, std::size_t M, std::uint64_t seed,
               int threads = 1);

// ----------------------------------------------------------------------------
// D_post: mean distance from the observed statistics to posterior predictive
// replicates.

// reject -> adjust_linear (on the simulator's transformed parameter scale) ->
// sample_posterior -> simulate, giving an n_prime x k replicate matrix.
Matrix posterior_replicates(const ReferenceTable& table,
                            std::span<const double> observed,
                            const ScalingVector& scaling, double rate,
                            const Simulator& simulator, std::size_t n_prime,
                            Rng& rng,
                            std::optional<std::size_t> exclude = std::nullopt);

// MAD scaling of pooled replicates. Columns whose replicate MAD is zero fall
// back to the prior-table scale of that column.
ScalingVector fit_replicate_scaling(const Matrix& pooled,
                                    const ScalingVector& prior_scaling);

double mean_distance(const Matrix& replicates, std::span<const double> observed,
                     const ScalingVector& scaling);

struct DPostResult {
  double value = 0.0;
  Matrix replicates;
  std::vector<double> replicate_scales;
};

// Single-run D_post; replicate scaling is fit on this run's own replicates.
// Replicates come from stream (seed, observed_replicate).
DPostResult d_post(const ReferenceTable& table, std::span<const double> observed,
                   const ScalingVector& scaling, double rate,
                   const Simulator& simulator, std::size_t n_prime,
                   std::uint64_t seed);
DPostResult d_post(const ReferenceTable& table, const ObservedStats& observed,
                   const ScalingVector& scaling, double rate,
                   const Simulator& simulator, std::size_t n_prime,
                   std::uint64_t seed);

struct PostNullDistribution {
  std::vector<std::size_t> rows;     // pseudo-observed table rows
  std::vector<double> values;        // D_post of each row
  std::vector<Matrix> replicates;    // n_prime x k per row
  std::vector<double> replicate_scales;
};

// Two passes: simulate every replicate set (row r uses stream
// (seed, null_replicate, r)), fit one scaling on the pooled M x n_prime
// replicates plus `extra_pool` rows if given, then compute all distances.
PostNullDistribution null_distribution_post_for_rows(
    const ReferenceTable& table, const ScalingVector& scaling, double rate,
    const Simulator& simulator, std::size_t n_prime,
    std::span<const std::size_t> rows, std::uint64_t seed, int threads = 1,
    const Matrix* extra_pool = nullptr);

PostNullDistribution null_distribution_post(
    const ReferenceTable& table, const ScalingVector& scaling, double rate,
    const Simulator& simulator, std::size_t n_prime, std::size_t M,
    std::uint64_t seed, int threads = 1);

struct GofPostOutcome {
  GofResult result;
  Matrix observed_replicates;  // reusable by posterior predictive checks
  std::vector<double> replicate_scales;
};

// The real-data replicates join the pooled null replicates when fitting the
// replicate scaling, and that one scaling is applied to every D_post value.
GofPostOutcome gfit_post(const ReferenceTable& table,
                         const ObservedStats& observed, double rate,
                         const Simulator& simulator, std::size_t n_prime,
                         std::size_t M, std::uint64_t seed, int threads = 1);

}  // namespace abcgof
