#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>

#include "abcgof/parallel.hpp"
#include "abcgof/rng.hpp"

using namespace abcgof;

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  auto a = Rng::stream(42, StreamTag::table_row, 7);
  auto b = Rng::stream(42, StreamTag::table_row, 7);
  auto c = Rng::stream(42, StreamTag::table_row, 8);
  auto d = Rng::stream(42, StreamTag::pseudo_observed, 7);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
  EXPECT_NE(derive_seed(1, StreamTag::dataset, 0),
            derive_seed(2, StreamTag::dataset, 0));
}

TEST(Rng, UniformMoments) {
  Rng rng(1);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - 0.25, 1.0 / 12.0, 0.002);
}

TEST(Rng, NormalExponentialChiSquareMoments) {
  Rng rng(2);
  const int n = 200000;
  double nm = 0, nv = 0, em = 0, cm = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    nm += z;
    nv += z * z;
    em += rng.exponential();
    cm += rng.chi_square(3);
  }
  EXPECT_NEAR(nm / n, 0.0, 0.01);
  EXPECT_NEAR(nv / n, 1.0, 0.01);
  EXPECT_NEAR(em / n, 1.0, 0.01);
  EXPECT_NEAR(cm / n, 3.0, 0.03);
}

TEST(Rng, PoissonMeanAndVariance) {
  Rng rng(3);
  for (double mean : {0.0, 0.3, 4.0, 60.0, 750.0}) {
    const int n = 50000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(rng.poisson(mean));
      s += x;
      s2 += x * x;
    }
    const double m = s / n;
    const double v = s2 / n - m * m;
    const double tol = 5.0 * std::sqrt(std::max(mean, 1e-3) / n);
    EXPECT_NEAR(m, mean, tol) << mean;
    EXPECT_NEAR(v, mean, 0.05 * mean + 0.01) << mean;
  }
}

TEST(Rng, UniformIndexIsUnbiased) {
  Rng rng(4);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  EXPECT_LT(chi2, 22.46);  // chi2(6) upper 0.1% point
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + rng.uniform_index(100);
    const auto k = rng.uniform_index(n + 1);
    const auto s = rng.sample_without_replacement(n, k);
    ASSERT_EQ(s.size(), k);
    std::set<std::size_t> distinct(s.begin(), s.end());
    EXPECT_EQ(distinct.size(), k);
    for (auto v : s) EXPECT_LT(v, n);
  }
}

TEST(Parallel, EveryIndexOnceForAnyThreadCount) {
  for (int threads : {1, 2, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, RethrowsLowestFailingIndex) {
  for (int threads : {1, 4}) {
    try {
      parallel_for(100, threads, [](std::size_t i) {
        if (i == 17 || i == 63) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17");
    }
  }
}

TEST(Parallel, EffectiveThreads) {
  EXPECT_EQ(effective_threads(0), 1);
  EXPECT_EQ(effective_threads(-3), 1);
  EXPECT_EQ(effective_threads(5), 5);
}
