#include "abcgof/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "abcgof/diagnostics.hpp"
#include "abcgof/error.hpp"

namespace abcgof {
namespace {

constexpr double kEigenTieTolerance = 1e-10;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

Point2 PcaProjection::project(std::span<const double> stats) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(usable.size()));
  for (std::size_t c = 0; c < usable.size(); ++c) {
    if (usable[c] >= stats.size()) throw usage_error("project: short vector");
    z[static_cast<Eigen::Index>(c)] = stats[usable[c]] * inverse_scales[c];
  }
  const Eigen::VectorXd s = loadings.transpose() * (z - mean);
  return {s[0], s[1]};
}

PcaProjection pca_fit(const ReferenceTable& table,
                      const ScalingVector& scaling) {
  if (table.rows() < 3) throw usage_error("pca: need at least 3 simulations");
  if (scaling.size() != table.num_stats()) {
    throw usage_error("pca: scaling does not match the table");
  }
  PcaProjection out;
  for (std::size_t j = 0; j < scaling.size(); ++j) {
    if (!scaling.is_dropped(j)) {
      out.usable.push_back(j);
      out.inverse_scales.push_back(scaling.inverse()[j]);
    }
  }
  const auto k = static_cast<Eigen::Index>(out.usable.size());
  if (k < 2) throw data_error("pca: fewer than 2 usable statistics");

  const auto n = static_cast<Eigen::Index>(table.rows());
  Eigen::MatrixXd z(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto j = static_cast<Eigen::Index>(out.usable[c]);
    z.col(c) = table.stats().col(j) * out.inverse_scales[c];
  }
  out.mean = z.colwise().mean().transpose();
  z.rowwise() -= out.mean.transpose();
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw data_error("pca: eigen-decomposition failed");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const double trace = cov.trace();

  // Order by descending eigenvalue; near-equal values keep the solver's
  // column order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::reverse(order.begin(), order.end());
  const double tie = kEigenTieTolerance * std::max(trace, 1.0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return values[a] > values[b] + tie;
  });

  out.loadings.resize(k, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(order[c]);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < k; ++i) {
      if (std::abs(v[i]) > std::abs(v[arg]) + 1e-12) arg = i;
    }
    if (v[arg] < 0) v = -v;
    out.loadings.col(c) = v.normalized();
    out.explained_fraction[c] =
        trace > 0.0 ? std::max(values[order[c]], 0.0) / trace : 0.0;
  }

  const Eigen::MatrixXd scores = z * out.loadings;
  out.scores.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.scores[static_cast<std::size_t>(i)] = {scores(i, 0), scores(i, 1)};
  }
  return out;
}

std::vector<Point2> convex_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Point2> hull(2 * points.size());
  std::size_t h = 0;
  for (const auto& p : points) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
    hull[h++] = p;
  }
  const std::size_t lower = h + 1;
  for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], *it) <= 0) --h;
    hull[h++] = *it;
  }
  hull.resize(h - 1);
  return hull;
}

bool convex_polygon_contains(std::span<const Point2> polygon,
                             const Point2& point) {
  if (polygon.empty()) return false;
  // Scale-aware tolerance for "on the boundary".
  double extent = 0.0;
  for (const auto& v : polygon) {
    extent = std::max({extent, std::abs(v[0]), std::abs(v[1])});
  }
  const double eps = 1e-12 * std::max(extent, 1.0) * std::max(extent, 1.0);

  if (polygon.size() == 1) {
    return std::abs(polygon[0][0] - point[0]) <= 1e-12 * std::max(extent, 1.0) &&
           std::abs(polygon[0][1] - point[1]) <= 1e-12 * std::max(extent, 1.0);
  }
  if (polygon.size() == 2) {
    const auto& a = polygon[0];
    const auto& b = polygon[1];
    if (std::abs(cross(a, b, point)) > eps) return false;
    const double dot = (point[0] - a[0]) * (b[0] - a[0]) +
                       (point[1] - a[1]) * (b[1] - a[1]);
    const double len2 = (b[0] - a[0]) * (b[0] - a[0]) +
                        (b[1] - a[1]) * (b[1] - a[1]);
    return dot >= -eps && dot <= len2 + eps;
  }
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    if (cross(a, b, point) < -eps) return false;
  }
  return true;
}

Envelope envelope(std::span<const Point2> scores, const Point2& observed,
                  double coverage) {
  if (!(coverage > 0.0 && coverage < 1.0)) {
    throw usage_error("envelope: coverage must lie in (0, 1)");
  }
  const std::size_t n = scores.size();
  if (n < 3) throw usage_error("envelope: need at least 3 points");

  Point2 centroid{0.0, 0.0};
  for (const auto& s : scores) {
    centroid[0] += s[0];
    centroid[1] += s[1];
  }
  centroid[0] /= static_cast<double>(n);
  centroid[1] /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& s : scores) {
    const double dx = s[0] - centroid[0];
    const double dy = s[1] - centroid[1];
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  sxx /= static_cast<double>(n - 1);
  syy /= static_cast<double>(n - 1);
  sxy /= static_cast<double>(n - 1);
  const double det = sxx * syy - sxy * sxy;
  const bool singular = !(det > 1e-12 * std::max(sxx * syy, 1e-300));
  if (singular) {
    warn("envelope: degenerate score covariance, ranking by Euclidean distance");
  }

  std::vector<std::pair<double, std::size_t>> ranked(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = scores[i][0] - centroid[0];
    const double dy = scores[i][1] - centroid[1];
    const double d = singular
                         ? dx * dx + dy * dy
                         : (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) /
                               det;
    ranked[i] = {d, i};
  }
  std::sort(ranked.begin(), ranked.end());
  const auto keep = std::min<std::size_t>(
      n, static_cast<std::size_t>(
             std::ceil(coverage * static_cast<double>(n) - 1e-9)));

  std::vector<Point2> kept;
  kept.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) kept.push_back(scores[ranked[i].second]);

  Envelope out;
  out.coverage = coverage;
  out.polygon = convex_hull(std::move(kept));
  out.contains_observed = convex_polygon_contains(out.polygon, observed);
  return out;
}

void write_scores_tsv(std::ostream& out, std::span<const Point2> scores,
                      const Point2& observed) {
  out << "pc1\tpc2\tkind\n";
  for (const auto& s : scores) {
    out << format_double(s[0]) << '\t' << format_double(s[1]) << "\tsim\n";
  }
  out << format_double(observed[0]) << '\t' << format_double(observed[1])
      << "\tobserved\n";
}

void write_polygon_tsv(std::ostream& out, std::span<const Point2> polygon) {
  out << "pc1\tpc2\n";
  for (const auto& v : polygon) {
    out << format_double(v[0]) << '\t' << format_double(v[1]) << '\n';
  }
}

}  // namespace abcgof
