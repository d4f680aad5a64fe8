#include "abcgof/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "abcgof/error.hpp"
#include "abcgof/parallel.hpp"

namespace abcgof {

void PowerStudyConfig::validate() const {
  if (n_sims < 2 || M == 0 || n_prime == 0 || n_datasets == 0) {
    throw usage_error("study: counts must be positive (n_sims >= 2)");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw usage_error("study: alpha must lie in (0, 1]");
  }
  if (M > n_sims) throw usage_error("more replicates than simulations");
}

bool rejects(double p, double alpha) { return alpha >= 1.0 || p < alpha; }

ReferenceTable study_reference_table(const PowerStudyConfig& config,
                                     int threads) {
  const auto sim = make_simulator(config.null_model, config.model_options);
  return simulate_reference_table(
      *sim, config.n_sims,
      derive_seed(config.master_seed, StreamTag::reference_table), threads);
}

ObservedStats study_dataset(const Simulator& truth, std::uint64_t master_seed,
                            std::size_t index) {
  auto rng = Rng::stream(master_seed, StreamTag::dataset, index);
  const auto theta = truth.draw_prior(rng);
  return {truth.stat_names(), truth.simulate(theta, rng)};
}

PowerStudyResult run_study(const PowerStudyConfig& config, int threads,
                           const ReferenceTable* table) {
  config.validate();
  const auto null_sim = make_simulator(config.null_model, config.model_options);
  const auto truth = make_simulator(config.alt_model, config.model_options);
  if (truth->stat_names() != null_sim->stat_names()) {
    throw usage_error("study: " + truth->name() + " and " + null_sim->name() +
                      " produce different statistics");
  }

  std::optional<ReferenceTable> own;
  if (!table) {
    own.emplace(study_reference_table(config, threads));
    table = &*own;
  } else if (table->rows() != config.n_sims ||
             table->stat_names() != null_sim->stat_names()) {
    throw usage_error("study: supplied table does not match the null model");
  }

  PowerStudyResult result;
  result.config = config;
  result.p_values.resize(config.n_datasets);
  const auto test_seed = [&](std::size_t i) {
    return derive_seed(config.master_seed, StreamTag::dataset_test, i);
  };

  if (config.statistic == StatisticKind::prior) {
    // Every dataset's null sample is drawn from the same leave-one-out
    // values, so those are computed once for the whole table.
    const auto scaling = fit_scaling(*table);
    std::vector<std::size_t> all(table->rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto loo = leave_one_out_prior(*table, scaling,
                                         config.acceptance_rate, all, threads);
    parallel_for(config.n_datasets, threads, [&](std::size_t i) {
      const auto observed = study_dataset(*truth, config.master_seed, i);
      const double d = d_prior(*table, observed.values, scaling,
                               config.acceptance_rate);
      const auto rows = pseudo_observed_rows(table->rows(), config.M,
                                             test_seed(i));
      std::vector<double> nulls(rows.size());
      for (std::size_t j = 0; j < rows.size(); ++j) nulls[j] = loo[rows[j]];
      result.p_values[i] = p_value(d, nulls);
    });
  } else {
    parallel_for(config.n_datasets, threads, [&](std::size_t i) {
      const auto observed = study_dataset(*truth, config.master_seed, i);
      const auto outcome =
          gfit_post(*table, observed, config.acceptance_rate, *null_sim,
                    config.n_prime, config.M, test_seed(i), 1);
      result.p_values[i] = outcome.result.p_value;
    });
  }

  for (double p : result.p_values) {
    if (rejects(p, config.alpha)) ++result.rejections;
  }
  result.rejection_rate = static_cast<double>(result.rejections) /
                          static_cast<double>(config.n_datasets);
  result.ks_statistic = ks_uniform_statistic(result.p_values);
  result.ks_uniformity_p = ks_uniform_p_value(result.p_values);
  return result;
}

PowerStudyResult run_calibration(const PowerStudyConfig& config, int threads,
                                 const ReferenceTable* table) {
  if (config.null_model != config.alt_model) {
    throw usage_error("calibration needs the same null and true model");
  }
  return run_study(config, threads, table);
}

PowerStudyResult run_power(const PowerStudyConfig& config, int threads,
                           const ReferenceTable* table) {
  if (config.null_model == config.alt_model) {
    throw usage_error("power needs different null and true models");
  }
  return run_study(config, threads, table);
}

double ks_uniform_statistic(std::vector<double> values) {
  if (values.empty()) throw usage_error("KS test: no values");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - u,
                  u - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Jacobi theta form of the CDF converges fast for small x.
    const double pi = std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(-m * m * pi * pi / (8.0 * x * x));
    }
    cdf *= std::sqrt(2.0 * pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_uniform_p_value(const std::vector<double>& values) {
  const double d = ks_uniform_statistic(values);
  const double root_n = std::sqrt(static_cast<double>(values.size()));
  return kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d);
}

double two_proportion_p_value(std::size_t successes1, std::size_t trials1,
                              std::size_t successes2, std::size_t trials2) {
  if (trials1 == 0 || trials2 == 0 || successes1 > trials1 ||
      successes2 > trials2) {
    throw usage_error("two-proportion test: invalid counts");
  }
  const double n1 = static_cast<double>(trials1);
  const double n2 = static_cast<double>(trials2);
  const double p1 = static_cast<double>(successes1) / n1;
  const double p2 = static_cast<double>(successes2) / n2;
  const double pooled =
      static_cast<double>(successes1 + successes2) / (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (se == 0.0) return p1 > p2 ? 0.0 : 1.0;
  const double z = (p1 - p2) / se;
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

std::vector<HistogramBin> emit_pvalue_histogram(const PowerStudyResult& result,
                                                std::size_t bins) {
  return equal_width_histogram(result.p_values, 0.0, 1.0, bins);
}

void write_pvalue_histogram_tsv(std::ostream& out,
                                const std::vector<HistogramBin>& bins) {
  out << "bin_lo\tbin_hi\tcount\n";
  for (const auto& b : bins) {
    out << format_double(b.lo) << '\t' << format_double(b.hi) << '\t'
        << b.count << '\n';
  }
}

}  // namespace abcgof
