#include "abcgof/gof.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "abcgof/error.hpp"
#include "abcgof/parallel.hpp"

namespace abcgof {
namespace {

void check_simulator_matches(const ReferenceTable& table,
                             const Simulator& simulator) {
  if (simulator.stat_names() != table.stat_names()) {
    throw usage_error("simulator " + simulator.name() +
                      " does not produce the reference table's statistics");
  }
  if (simulator.param_names() != table.param_names()) {
    throw usage_error("simulator " + simulator.name() +
                      " does not use the reference table's parameters");
  }
}

void check_replicate_args(std::size_t n_prime) {
  if (n_prime == 0) throw usage_error("n_prime must be >= 1");
}

std::vector<double> run_simulator(const Simulator& simulator,
                                  std::span<const double> theta, Rng& rng) {
  std::vector<double> s;
  try {
    s = simulator.simulate(theta, rng);
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(simulator.name() + " failed: " + e.what(),
                          {theta.begin(), theta.end()});
  }
  if (s.size() != simulator.stat_names().size()) {
    throw SimulationError(simulator.name() + ": wrong statistic count",
                          {theta.begin(), theta.end()});
  }
  for (double v : s) {
    if (!std::isfinite(v)) {
      throw SimulationError(simulator.name() + ": non-finite statistic",
                            {theta.begin(), theta.end()});
    }
  }
  return s;
}

}  // namespace

const char* to_string(StatisticKind kind) {
  return kind == StatisticKind::prior ? "prior" : "post";
}

double GofResult::p_value_conservative() const {
  return abcgof::p_value_conservative(observed_value, null_values);
}

double p_value(double observed, std::span<const double> nulls) {
  if (nulls.empty()) throw usage_error("p_value: no null values");
  const auto count = std::count_if(nulls.begin(), nulls.end(),
                                   [&](double d) { return d >= observed; });
  return static_cast<double>(count) / static_cast<double>(nulls.size());
}

double p_value_conservative(double observed, std::span<const double> nulls) {
  if (nulls.empty()) throw usage_error("p_value: no null values");
  const auto count = std::count_if(nulls.begin(), nulls.end(),
                                   [&](double d) { return d >= observed; });
  return static_cast<double>(count + 1) /
         static_cast<double>(nulls.size() + 1);
}

double d_prior(const ReferenceTable& table, std::span<const double> observed,
               const ScalingVector& scaling, double rate,
               std::optional<std::size_t> exclude) {
  const auto accepted = reject(table, observed, scaling, rate, exclude);
  const double total = std::accumulate(accepted.distances.begin(),
                                       accepted.distances.end(), 0.0);
  return total / static_cast<double>(accepted.distances.size());
}

double d_prior(const ReferenceTable& table, const ObservedStats& observed,
               const ScalingVector& scaling, double rate,
               std::optional<std::size_t> exclude) {
  const auto aligned = observed.aligned_to(table.stat_names());
  return d_prior(table, aligned.values, scaling, rate, exclude);
}

std::vector<std::size_t> pseudo_observed_rows(std::size_t n, std::size_t M,
                                              std::uint64_t seed) {
  if (M == 0) throw usage_error("M must be >= 1");
  if (M > n) throw usage_error("more replicates than simulations");
  if (M == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  auto rng = Rng::stream(seed, StreamTag::pseudo_observed);
  return rng.sample_without_replacement(n, M);
}

std::vector<double> leave_one_out_prior(const ReferenceTable& table,
                                        const ScalingVector& scaling,
                                        double rate,
                                        std::span<const std::size_t> rows,
                                        int threads) {
  std::vector<double> out(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t j) {
    const auto row = rows[j];
    out[j] = d_prior(table, table.stat_row(row), scaling, rate, row);
  });
  return out;
}

std::vector<double> null_distribution_prior(const ReferenceTable& table,
                                            const ScalingVector& scaling,
                                            double rate, std::size_t M,
                                            std::uint64_t seed, int threads) {
  const auto rows = pseudo_observed_rows(table.rows(), M, seed);
  return leave_one_out_prior(table, scaling, rate, rows, threads);
}

GofResult gfit(const ReferenceTable& table, const ObservedStats& observed,
               double rate, std::size_t M, std::uint64_t seed, int threads) {
  const auto aligned = observed.aligned_to(table.stat_names());
  const auto scaling = fit_scaling(table);
  GofResult result;
  result.kind = StatisticKind::prior;
  result.settings = {rate, M, std::nullopt, seed};
  result.observed_value = d_prior(table, aligned.values, scaling, rate);
  result.null_values =
      null_distribution_prior(table, scaling, rate, M, seed, threads);
  result.p_value = p_value(result.observed_value, result.null_values);
  return result;
}

Matrix posterior_replicates(const ReferenceTable& table,
                            std::span<const double> observed,
                            const ScalingVector& scaling, double rate,
                            const Simulator& simulator, std::size_t n_prime,
                            Rng& rng, std::optional<std::size_t> exclude) {
  check_replicate_args(n_prime);
  const auto accepted = reject(table, observed, scaling, rate, exclude);
  const auto transforms = simulator.param_transforms();
  const auto n = static_cast<Eigen::Index>(accepted.indices.size());
  const auto p = static_cast<Eigen::Index>(table.num_params());
  if (transforms.size() != table.num_params()) {
    throw usage_error("simulator declares the wrong number of transforms");
  }

  Matrix params(n, p);
  Matrix stats(n, static_cast<Eigen::Index>(table.num_stats()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(accepted.indices[i]);
    for (Eigen::Index j = 0; j < p; ++j) {
      params(i, j) = transforms[j].forward(table.params()(row, j));
    }
    stats.row(i) = table.stats().row(row);
  }
  const auto posterior =
      adjust_linear(std::move(params), stats, accepted, observed, scaling);
  const Matrix draws = sample_posterior(posterior, n_prime, rng);

  Matrix replicates(static_cast<Eigen::Index>(n_prime),
                    static_cast<Eigen::Index>(table.num_stats()));
  std::vector<double> theta(static_cast<std::size_t>(p));
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    for (Eigen::Index j = 0; j < p; ++j) {
      theta[j] = transforms[j].inverse(draws(r, j));
    }
    const auto s = run_simulator(simulator, theta, rng);
    for (std::size_t j = 0; j < s.size(); ++j) {
      replicates(r, static_cast<Eigen::Index>(j)) = s[j];
    }
  }
  return replicates;
}

ScalingVector fit_replicate_scaling(const Matrix& pooled,
                                    const ScalingVector& prior_scaling) {
  if (static_cast<std::size_t>(pooled.cols()) != prior_scaling.size()) {
    throw usage_error("replicate scaling: dimension mismatch");
  }
  std::vector<double> scales(prior_scaling.size());
  std::vector<double> column(static_cast<std::size_t>(pooled.rows()));
  for (Eigen::Index j = 0; j < pooled.cols(); ++j) {
    for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
      column[static_cast<std::size_t>(i)] = pooled(i, j);
    }
    const double s = mad(column);
    scales[j] = s > 0.0 ? s : prior_scaling.scales()[j];
  }
  return ScalingVector(std::move(scales));
}

double mean_distance(const Matrix& replicates, std::span<const double> observed,
                     const ScalingVector& scaling) {
  if (replicates.rows() == 0) throw usage_error("mean_distance: no replicates");
  double total = 0.0;
  for (Eigen::Index i = 0; i < replicates.rows(); ++i) {
    total += distance(row_span(replicates, i), observed, scaling);
  }
  return total / static_cast<double>(replicates.rows());
}

DPostResult d_post(const ReferenceTable& table, std::span<const double> observed,
                   const ScalingVector& scaling, double rate,
                   const Simulator& simulator, std::size_t n_prime,
                   std::uint64_t seed) {
  check_simulator_matches(table, simulator);
  auto rng = Rng::stream(seed, StreamTag::observed_replicate);
  DPostResult out;
  out.replicates = posterior_replicates(table, observed, scaling, rate,
                                        simulator, n_prime, rng);
  const auto rep_scaling = fit_replicate_scaling(out.replicates, scaling);
  out.replicate_scales = rep_scaling.scales();
  out.value = mean_distance(out.replicates, observed, rep_scaling);
  return out;
}

DPostResult d_post(const ReferenceTable& table, const ObservedStats& observed,
                   const ScalingVector& scaling, double rate,
                   const Simulator& simulator, std::size_t n_prime,
                   std::uint64_t seed) {
  const auto aligned = observed.aligned_to(table.stat_names());
  return d_post(table, std::span<const double>(aligned.values), scaling, rate,
                simulator, n_prime, seed);
}

PostNullDistribution null_distribution_post_for_rows(
    const ReferenceTable& table, const ScalingVector& scaling, double rate,
    const Simulator& simulator, std::size_t n_prime,
    std::span<const std::size_t> rows, std::uint64_t seed, int threads,
    const Matrix* extra_pool) {
  check_simulator_matches(table, simulator);
  check_replicate_args(n_prime);
  if (rows.empty()) throw usage_error("M must be >= 1");

  PostNullDistribution out;
  out.rows.assign(rows.begin(), rows.end());
  out.replicates.resize(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t j) {
    const auto row = rows[j];
    auto rng = Rng::stream(seed, StreamTag::null_replicate, row);
    out.replicates[j] =
        posterior_replicates(table, table.stat_row(row), scaling, rate,
                             simulator, n_prime, rng, row);
  });

  const auto k = static_cast<Eigen::Index>(table.num_stats());
  const auto extra = extra_pool ? extra_pool->rows() : 0;
  Matrix pooled(static_cast<Eigen::Index>(rows.size() * n_prime) + extra, k);
  Eigen::Index at = 0;
  for (const auto& reps : out.replicates) {
    pooled.middleRows(at, reps.rows()) = reps;
    at += reps.rows();
  }
  if (extra_pool) pooled.bottomRows(extra) = *extra_pool;
  const auto rep_scaling = fit_replicate_scaling(pooled, scaling);
  out.replicate_scales = rep_scaling.scales();

  out.values.resize(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    out.values[j] =
        mean_distance(out.replicates[j], table.stat_row(rows[j]), rep_scaling);
  }
  return out;
}

PostNullDistribution null_distribution_post(
    const ReferenceTable& table, const ScalingVector& scaling, double rate,
    const Simulator& simulator, std::size_t n_prime, std::size_t M,
    std::uint64_t seed, int threads) {
  const auto rows = pseudo_observed_rows(table.rows(), M, seed);
  return null_distribution_post_for_rows(table, scaling, rate, simulator,
                                         n_prime, rows, seed, threads);
}

GofPostOutcome gfit_post(const ReferenceTable& table,
                         const ObservedStats& observed, double rate,
                         const Simulator& simulator, std::size_t n_prime,
                         std::size_t M, std::uint64_t seed, int threads) {
  check_simulator_matches(table, simulator);
  const auto aligned = observed.aligned_to(table.stat_names());
  const auto scaling = fit_scaling(table);

  auto rng = Rng::stream(seed, StreamTag::observed_replicate);
  GofPostOutcome out;
  out.observed_replicates = posterior_replicates(
      table, aligned.values, scaling, rate, simulator, n_prime, rng);

  const auto rows = pseudo_observed_rows(table.rows(), M, seed);
  auto null = null_distribution_post_for_rows(table, scaling, rate, simulator,
                                              n_prime, rows, seed, threads,
                                              &out.observed_replicates);
  const ScalingVector rep_scaling(null.replicate_scales);
  out.replicate_scales = null.replicate_scales;

  auto& result = out.result;
  result.kind = StatisticKind::post;
  result.settings = {rate, M, n_prime, seed};
  result.observed_value =
      mean_distance(out.observed_replicates, aligned.values, rep_scaling);
  result.null_values = std::move(null.values);
  result.p_value = p_value(result.observed_value, result.null_values);
  return out;
}

}  // namespace abcgof
