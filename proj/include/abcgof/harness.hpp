#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abcgof/gof.hpp"
#include "abcgof/models.hpp"
#include "abcgof/ppc.hpp"

namespace abcgof {

// One type-I-error or power experiment: observed datasets drawn from
// `alt_model` are tested against one reference table of `null_model`.
struct PowerStudyConfig {
  std::string null_model = "toy-gaussian";
  std::string alt_model = "toy-gaussian";
  ModelOptions model_options;
  StatisticKind statistic = StatisticKind::prior;
  std::size_t n_sims = 10000;
  double acceptance_rate = 0.01;
  std::size_t M = 500;
  std::size_t n_prime = 100;
  std::size_t n_datasets = 500;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;

  void validate() const;
};

struct PowerStudyResult {
  PowerStudyConfig config;
  std::vector<double> p_values;  // one per dataset, in dataset order
  std::size_t rejections = 0;
  double rejection_rate = 0.0;
  double ks_statistic = 0.0;
  double ks_uniformity_p = 1.0;
};

// Counts p < alpha. A level-1 test rejects every dataset, including p = 1.
bool rejects(double p, double alpha);

// The study's reference table: n_sims draws from the null model, stream
// (master_seed, reference_table).
ReferenceTable study_reference_table(const PowerStudyConfig& config,
                                     int threads = 1);

// Dataset i is simulated from stream (master_seed, dataset, i) and tested
// with gof seed derive_seed(master_seed, dataset_test, i), so each P-value
// equals that of a standalone gfit / gfit_post call with that seed.
// `table` may supply a precomputed study_reference_table.
PowerStudyResult run_study(const PowerStudyConfig& config, int threads = 1,
                           const ReferenceTable* table = nullptr);

// run_study with null_model == alt_model enforced.
PowerStudyResult run_calibration(const PowerStudyConfig& config,
                                 int threads = 1,
                                 const ReferenceTable* table = nullptr);
// run_study with null_model != alt_model enforced.
PowerStudyResult run_power(const PowerStudyConfig& config, int threads = 1,
                           const ReferenceTable* table = nullptr);

// Observed statistics of dataset i, as run_study draws them.
ObservedStats study_dataset(const Simulator& truth, std::uint64_t master_seed,
                            std::size_t index);

// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
double ks_uniform_statistic(std::vector<double> values);
// Asymptotic Kolmogorov tail P(K > x).
double kolmogorov_survival(double x);
// KS p-value with Stephens' small-sample correction.
double ks_uniform_p_value(const std::vector<double>& values);

// One-sided two-proportion z-test of H1: p1 > p2 (pooled variance).
double two_proportion_p_value(std::size_t successes1, std::size_t trials1,
                              std::size_t successes2, std::size_t trials2);

// Equal-width bins on [0, 1]; counts sum to the number of datasets.
std::vector<HistogramBin> emit_pvalue_histogram(const PowerStudyResult& result,
                                                std::size_t bins);
// Columns: bin_lo, bin_hi, count.
void write_pvalue_histogram_tsv(std::ostream& out,
                                const std::vector<HistogramBin>& bins);

}  // namespace abcgof
