#include "abcgof/adjust.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "abcgof/diagnostics.hpp"
#include "abcgof/error.hpp"

namespace abcgof {
namespace {

constexpr double kRankTolerance = 1e-10;

std::vector<double> kernel_weights(const std::vector<double>& distances,
                                   bool& degenerate) {
  const std::size_t n = distances.size();
  const double d_max = *std::max_element(distances.begin(), distances.end());
  std::vector<double> w(n, 1.0);
  degenerate = d_max == 0.0;
  if (degenerate) return w;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = distances[i] / d_max;
    w[i] = 1.0 - r * r;
    total += w[i];
  }
  // Every row on the boundary: the kernel would zero the whole sample.
  if (total == 0.0) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

void normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
}

}  // namespace

PosteriorSample adjust_linear(Matrix accepted_params,
                              const Matrix& accepted_stats,
                              const AcceptanceSet& accepted,
                              std::span<const double> observed,
                              const ScalingVector& scaling) {
  const auto n = static_cast<Eigen::Index>(accepted.indices.size());
  if (n == 0) throw usage_error("adjust_linear: empty acceptance set");
  if (accepted_params.rows() != n || accepted_stats.rows() != n ||
      accepted.distances.size() != accepted.indices.size()) {
    throw usage_error("adjust_linear: accepted rows are misaligned");
  }
  if (observed.size() != static_cast<std::size_t>(accepted_stats.cols()) ||
      scaling.size() != observed.size()) {
    throw usage_error("adjust_linear: statistic dimension mismatch");
  }

  std::vector<std::size_t> usable;
  for (std::size_t j = 0; j < scaling.size(); ++j) {
    if (!scaling.is_dropped(j)) usable.push_back(j);
  }
  const auto p = accepted_params.cols();
  const auto k = static_cast<Eigen::Index>(usable.size());
  if (n < p + k + 2) {
    throw usage_error("adjust_linear: " + std::to_string(n) +
                      " accepted rows, need at least p + k + 2 = " +
                      std::to_string(p + k + 2));
  }

  PosteriorSample out;
  out.source = accepted;
  bool degenerate = false;
  out.weights = kernel_weights(accepted.distances, degenerate);
  normalize(out.weights);
  if (degenerate || p == 0) {
    out.params = std::move(accepted_params);
    return out;
  }

  // Design: intercept plus standardized statistics centered on the observed
  // vector, so the intercept is the posterior mean at s.
  Matrix x(n, k + 1);
  const auto& inv = scaling.inverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto j = usable[static_cast<std::size_t>(c)];
      x(i, c + 1) =
          (accepted_stats(i, static_cast<Eigen::Index>(j)) - observed[j]) *
          inv[j];
    }
  }
  const Eigen::Map<const Eigen::VectorXd> w(out.weights.data(), n);
  const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
  const Eigen::MatrixXd normal = xtw * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  lu.setThreshold(kRankTolerance);
  if (lu.rank() < normal.cols()) {
    warn("regression adjustment skipped: singular design matrix (rank " +
         std::to_string(lu.rank()) + " of " + std::to_string(normal.cols()) +
         ")");
    out.params = std::move(accepted_params);
    return out;
  }
  const Eigen::MatrixXd beta = lu.solve(xtw * accepted_params);
  // Drop the intercept row: theta* = theta - slopes applied to the regressors.
  out.params = accepted_params - x.rightCols(k) * beta.bottomRows(k);
  out.adjusted = true;
  return out;
}

PosteriorSample adjust_linear(const ReferenceTable& table,
                              const AcceptanceSet& accepted,
                              std::span<const double> observed,
                              const ScalingVector& scaling) {
  const auto n = static_cast<Eigen::Index>(accepted.indices.size());
  Matrix params(n, static_cast<Eigen::Index>(table.num_params()));
  Matrix stats(n, static_cast<Eigen::Index>(table.num_stats()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(accepted.indices[i]);
    if (accepted.indices[i] >= table.rows()) {
      throw usage_error("adjust_linear: accepted index out of range");
    }
    params.row(i) = table.params().row(row);
    stats.row(i) = table.stats().row(row);
  }
  return adjust_linear(std::move(params), stats, accepted, observed, scaling);
}

PosteriorSample adjust_linear(const ReferenceTable& table,
                              const AcceptanceSet& accepted,
                              const ObservedStats& observed,
                              const ScalingVector& scaling) {
  const auto aligned = observed.aligned_to(table.stat_names());
  return adjust_linear(table, accepted, aligned.values, scaling);
}

Matrix sample_posterior(const PosteriorSample& sample, std::size_t count,
                        Rng& rng) {
  if (count == 0) throw usage_error("sample_posterior: count must be >= 1");
  const auto n = sample.weights.size();
  if (n == 0 || static_cast<std::size_t>(sample.params.rows()) != n) {
    throw usage_error("sample_posterior: malformed posterior sample");
  }
  std::vector<double> cumulative(n);
  std::partial_sum(sample.weights.begin(), sample.weights.end(),
                   cumulative.begin());
  const double total = cumulative.back();
  if (!(total > 0.0)) throw data_error("sample_posterior: all weights are zero");

  Matrix out(static_cast<Eigen::Index>(count), sample.params.cols());
  for (std::size_t r = 0; r < count; ++r) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;  // u rounding up to the total
    // Skip trailing zero-weight rows that share the final cumulative value.
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    while (sample.weights[idx] == 0.0 && idx > 0) --idx;
    out.row(static_cast<Eigen::Index>(r)) =
        sample.params.row(static_cast<Eigen::Index>(idx));
  }
  return out;
}

}  // namespace abcgof
