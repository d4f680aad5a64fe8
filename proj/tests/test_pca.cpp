#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abcgof/diagnostics.hpp"
#include "abcgof/error.hpp"
#include "abcgof/pca.hpp"
#include "helpers.hpp"

using namespace abcgof;
using namespace testing_helpers;

namespace {

ReferenceTable correlated_table(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal();
    rows.push_back({a, a + 0.5 * b, 2 * b - c, 0.1 * c + a});
  }
  return table_from_stats(rows);
}

Eigen::VectorXd standardized(const PcaProjection& p, std::span<const double> s) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(p.usable.size()));
  for (std::size_t c = 0; c < p.usable.size(); ++c) {
    z[static_cast<Eigen::Index>(c)] = s[p.usable[c]] * p.inverse_scales[c];
  }
  return z;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

TEST(PcaFit, LineDataHasOneComponent) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 50; ++i) {
    const double t = i * 0.37 - 4;
    rows.push_back({t, 2 * t + 1, -t});
  }
  const auto t = table_from_stats(rows);
  const auto p = pca_fit(t, fit_scaling(t));
  EXPECT_NEAR(p.explained_fraction[0], 1.0, 1e-8);
}

TEST(PcaFit, IsotropicGaussianSplitsVariance) {
  Rng rng(4);
  std::vector<std::vector<double>> rows(100000, std::vector<double>(2));
  for (auto& r : rows) {
    r[0] = rng.normal();
    r[1] = rng.normal();
  }
  const auto t = table_from_stats(rows);
  const auto p = pca_fit(t, fit_scaling(t));
  EXPECT_NEAR(p.explained_fraction[0], 0.5, 0.01);
  EXPECT_NEAR(p.explained_fraction[1], 0.5, 0.01);
}

TEST(PcaFit, LoadingsOrthonormalAndScoresConsistent) {
  const auto t = correlated_table(500, 5);
  const auto p = pca_fit(t, fit_scaling(t));
  const Eigen::MatrixXd gram = p.loadings.transpose() * p.loadings;
  EXPECT_NEAR(gram(0, 0), 1.0, 1e-8);
  EXPECT_NEAR(gram(1, 1), 1.0, 1e-8);
  EXPECT_NEAR(gram(0, 1), 0.0, 1e-8);
  for (std::size_t i = 0; i < t.rows(); i += 37) {
    const auto z = standardized(p, t.stat_row(i));
    const Eigen::VectorXd s = p.loadings.transpose() * (z - p.mean);
    EXPECT_NEAR(s[0], p.scores[i][0], 1e-10);
    EXPECT_NEAR(s[1], p.scores[i][1], 1e-10);
    const auto q = p.project(t.stat_row(i));
    EXPECT_NEAR(q[0], p.scores[i][0], 1e-10);
    EXPECT_NEAR(q[1], p.scores[i][1], 1e-10);
  }
  for (Eigen::Index c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    p.loadings.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(p.loadings(arg, c), 0.0);
  }
}

TEST(PcaFit, ReconstructionErrorMatchesDiscardedVariance) {
  const auto t = correlated_table(800, 6);
  const auto p = pca_fit(t, fit_scaling(t));
  const auto n = static_cast<double>(t.rows());
  double total_var = 0, residual = 0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const Eigen::VectorXd c = standardized(p, t.stat_row(i)) - p.mean;
    const Eigen::VectorXd back = p.loadings * (p.loadings.transpose() * c);
    total_var += c.squaredNorm();
    residual += (c - back).squaredNorm();
  }
  total_var /= n - 1;
  residual /= n - 1;
  EXPECT_NEAR(residual,
              (1 - p.explained_fraction[0] - p.explained_fraction[1]) * total_var,
              1e-6);
}

TEST(PcaFit, LoadingsInvariantUnderRowPermutation) {
  const auto t = correlated_table(300, 7);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = t.rows(); i-- > 0;) {
    rows.emplace_back(t.stat_row(i).begin(), t.stat_row(i).end());
  }
  const auto r = table_from_stats(rows);
  const auto a = pca_fit(t, fit_scaling(t));
  const auto b = pca_fit(r, fit_scaling(r));
  EXPECT_LT((a.loadings - b.loadings).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PcaFit, NeedsTwoUsableStatistics) {
  ScopedWarningCapture quiet;
  const auto t = table_from_stats({{1, 5}, {2, 5}, {3, 5}, {4, 5}});
  EXPECT_THROW(pca_fit(t, fit_scaling(t)), Error);
  const auto tiny = table_from_stats({{1, 2}, {2, 1}});
  EXPECT_THROW(pca_fit(tiny, fit_scaling(tiny)), Error);
}

TEST(Envelope, NearFullCoverageIsHullOfAllPoints) {
  Rng rng(8);
  std::vector<Point2> pts(1000);
  for (auto& q : pts) q = {rng.normal(), rng.normal() * 3};
  // ceil(0.9999 * 1000) keeps every point.
  const auto env = envelope(pts, {0, 0}, 0.9999);
  EXPECT_EQ(env.polygon, convex_hull(pts));
  for (const auto& q : pts) EXPECT_TRUE(convex_polygon_contains(env.polygon, q));
}

TEST(Envelope, CentroidIsInside) {
  Rng rng(9);
  std::vector<Point2> pts(200);
  Point2 c{0, 0};
  for (auto& q : pts) {
    q = {rng.normal() + 3, rng.normal() - 1};
    c[0] += q[0] / 200;
    c[1] += q[1] / 200;
  }
  EXPECT_TRUE(envelope(pts, c, 0.9).contains_observed);
}

TEST(Envelope, SquareCornersExample) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto env = envelope(pts, {10, 10}, 0.8);
  EXPECT_FALSE(env.contains_observed);
}

TEST(Envelope, CoversRequestedFractionAndIsConvex) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 3 + rng.uniform_index(400);
    std::vector<Point2> pts(n);
    for (auto& q : pts) q = {rng.normal(), rng.normal() + 0.5 * q[0]};
    const double coverage = rng.uniform(0.05, 0.99);
    const auto env = envelope(pts, {0, 0}, coverage);
    std::size_t inside = 0;
    for (const auto& q : pts) inside += convex_polygon_contains(env.polygon, q);
    EXPECT_GE(static_cast<double>(inside), std::ceil(coverage * n - 1e-9));
    const auto& poly = env.polygon;
    for (std::size_t i = 0; poly.size() >= 3 && i < poly.size(); ++i) {
      EXPECT_GT(cross(poly[i], poly[(i + 1) % poly.size()],
                      poly[(i + 2) % poly.size()]),
                0.0);
    }
  }
}

TEST(Envelope, DegenerateCovarianceFallsBackToEuclidean) {
  std::vector<Point2> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({i * 1.0, i * 2.0});
  ScopedWarningCapture capture;
  const auto env = envelope(pts, {5, 10}, 0.5);
  EXPECT_FALSE(capture.messages().empty());
  EXPECT_TRUE(env.contains_observed);
  EXPECT_FALSE(convex_polygon_contains(env.polygon, {5, 11}));
}

TEST(Envelope, InvalidCoverage) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(envelope(pts, {0, 0}, 0.0), Error);
  EXPECT_THROW(envelope(pts, {0, 0}, 1.0), Error);
}
