#include <gtest/gtest.h>

#include <sstream>

#include "abcgof/error.hpp"
#include "abcgof/harness.hpp"

using namespace abcgof;

namespace {

PowerStudyConfig small(const std::string& null_model, const std::string& alt,
                       std::uint64_t seed) {
  PowerStudyConfig c;
  c.null_model = null_model;
  c.alt_model = alt;
  c.n_sims = 2000;
  c.M = 200;
  c.n_prime = 20;
  c.n_datasets = 200;
  c.acceptance_rate = 0.05;
  c.master_seed = seed;
  return c;
}

}  // namespace

TEST(Rejects, AlphaOneRejectsEverything) {
  EXPECT_TRUE(rejects(1.0, 1.0));
  EXPECT_TRUE(rejects(0.04, 0.05));
  EXPECT_FALSE(rejects(0.05, 0.05));
}

TEST(Study, AlphaOneGivesRateOne) {
  auto c = small("toy-gaussian", "toy-gaussian", 3);
  c.alpha = 1.0;
  c.n_datasets = 50;
  const auto r = run_calibration(c);
  EXPECT_EQ(r.rejections, 50u);
  EXPECT_EQ(r.rejection_rate, 1.0);
}

TEST(Study, ConfigValidation) {
  auto c = small("toy-gaussian", "toy-gaussian", 1);
  c.alpha = 0.0;
  EXPECT_THROW(run_study(c), Error);
  c = small("toy-gaussian", "toy-gaussian", 1);
  c.M = c.n_sims + 1;
  EXPECT_THROW(run_study(c), Error);
  EXPECT_THROW(run_power(small("toy-gaussian", "toy-gaussian", 1)), Error);
  EXPECT_THROW(run_calibration(small("toy-gaussian", "toy-laplace", 1)), Error);
  EXPECT_THROW(run_study(small("toy-gaussian", "constant", 1)), Error);
}

TEST(Study, DeterministicAcrossThreadCounts) {
  const auto c = small("toy-laplace", "toy-gaussian", 5);
  const auto a = run_study(c, 1);
  const auto b = run_study(c, 1);
  const auto d = run_study(c, 3);
  EXPECT_EQ(a.p_values, b.p_values);
  EXPECT_EQ(a.p_values, d.p_values);
}

TEST(Study, PValuesMatchStandaloneGfit) {
  const auto c = small("toy-gaussian", "toy-laplace", 7);
  const auto table = study_reference_table(c);
  const auto r = run_study(c, 1, &table);
  const auto truth = make_simulator(c.alt_model, c.model_options);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto obs = study_dataset(*truth, c.master_seed, i);
    const auto g = gfit(table, obs, c.acceptance_rate, c.M,
                        derive_seed(c.master_seed, StreamTag::dataset_test, i));
    EXPECT_EQ(r.p_values[i], g.p_value);
  }
}

TEST(Study, PostPValuesMatchStandaloneGfitPost) {
  auto c = small("toy-gaussian", "toy-laplace", 8);
  c.statistic = StatisticKind::post;
  c.n_sims = 500;
  c.M = 20;
  c.n_datasets = 3;
  c.acceptance_rate = 0.1;
  const auto table = study_reference_table(c);
  const auto r = run_study(c, 2, &table);
  const auto sim = make_simulator(c.null_model, c.model_options);
  const auto truth = make_simulator(c.alt_model, c.model_options);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto obs = study_dataset(*truth, c.master_seed, i);
    const auto g =
        gfit_post(table, obs, c.acceptance_rate, *sim, c.n_prime, c.M,
                  derive_seed(c.master_seed, StreamTag::dataset_test, i));
    EXPECT_EQ(r.p_values[i], g.result.p_value);
  }
}

// Under a true null the P-values are uniform: at most one of 20 independent
// calibration studies may fail the KS test at the 1% level.
TEST(Study, CalibrationPValuesAreUniform) {
  int passed = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto r = run_calibration(small("toy-gaussian", "toy-gaussian", seed));
    passed += r.ks_uniformity_p > 0.01 ? 1 : 0;
  }
  EXPECT_GE(passed, 19);
}

TEST(Study, PowerExceedsTypeOneError) {
  auto c = small("toy-gaussian", "toy-gaussian", 11);
  c.model_options.sample_size = 200;
  c.n_datasets = 300;
  const auto null_run = run_calibration(c);
  c.alt_model = "toy-laplace";
  const auto alt_run = run_power(c);
  EXPECT_GT(alt_run.rejection_rate, null_run.rejection_rate);
}

TEST(Histogram, UniformValuesFillBinsEvenly) {
  PowerStudyResult r;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) r.p_values.push_back(rng.uniform());
  const auto bins = emit_pvalue_histogram(r, 10);
  ASSERT_EQ(bins.size(), 10u);
  std::size_t total = 0;
  for (const auto& b : bins) {
    EXPECT_NEAR(static_cast<double>(b.count), 100.0, 30.0);
    total += b.count;
  }
  EXPECT_EQ(total, 1000u);
}

TEST(Histogram, AllZeroPValuesLandInFirstBin) {
  PowerStudyResult r;
  r.p_values.assign(40, 0.0);
  const auto bins = emit_pvalue_histogram(r, 10);
  EXPECT_EQ(bins[0].count, 40u);
  for (std::size_t i = 1; i < bins.size(); ++i) EXPECT_EQ(bins[i].count, 0u);
  r.p_values.assign(7, 1.0);
  EXPECT_EQ(emit_pvalue_histogram(r, 4).back().count, 7u);
}

TEST(Histogram, TsvLayout) {
  PowerStudyResult r;
  r.p_values = {0.1, 0.7, 0.9};
  std::ostringstream out;
  write_pvalue_histogram_tsv(out, emit_pvalue_histogram(r, 2));
  EXPECT_EQ(out.str(), "bin_lo\tbin_hi\tcount\n0\t0.5\t1\n0.5\t1\t2\n");
}

TEST(Ks, StatisticExamples) {
  EXPECT_DOUBLE_EQ(ks_uniform_statistic({0.5}), 0.5);
  EXPECT_NEAR(ks_uniform_statistic({0.25, 0.75}), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(ks_uniform_statistic({0.0, 0.0}), 1.0);
  EXPECT_THROW(ks_uniform_statistic({}), Error);
}

TEST(Ks, KolmogorovTailKnownValues) {
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(0.8276), 0.5, 1e-3);
  // Both series agree where they meet.
  EXPECT_NEAR(kolmogorov_survival(1.17999999), kolmogorov_survival(1.18), 1e-7);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Ks, UniformSamplesRarelyRejected) {
  Rng rng(2);
  int rejected = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(100);
    for (auto& x : v) x = rng.uniform();
    rejected += ks_uniform_p_value(v) < 0.05 ? 1 : 0;
  }
  EXPECT_NEAR(rejected, 50, 25);
  std::vector<double> skewed(100);
  for (auto& x : skewed) x = rng.uniform() * rng.uniform();
  EXPECT_LT(ks_uniform_p_value(skewed), 1e-3);
}

TEST(TwoProportion, KnownValues) {
  // p1 = 0.6, p2 = 0.4, n = 100 each: z = 0.2 / sqrt(0.25 * 0.02) = 2.828.
  EXPECT_NEAR(two_proportion_p_value(60, 100, 40, 100), 0.0023389, 1e-6);
  EXPECT_NEAR(two_proportion_p_value(50, 100, 50, 100), 0.5, 1e-15);
  EXPECT_GT(two_proportion_p_value(10, 100, 40, 100), 0.99);
  EXPECT_EQ(two_proportion_p_value(0, 10, 0, 10), 1.0);
  EXPECT_THROW(two_proportion_p_value(5, 4, 0, 10), Error);
}
