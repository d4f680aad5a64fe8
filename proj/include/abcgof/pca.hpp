#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "abcgof/core.hpp"

namespace abcgof {

using Point2 = std::array<double, 2>;

// First two principal components of the MAD-standardized statistics.
// Dropped (zero-MAD) statistics are excluded; `usable` lists the statistic
// columns that enter the projection.
struct PcaProjection {
  std::vector<std::size_t> usable;
  std::vector<double> inverse_scales;  // per usable column
  Eigen::VectorXd mean;                // of standardized usable columns
  Eigen::MatrixXd loadings;            // usable x 2, orthonormal columns
  std::vector<Point2> scores;          // one per table row
  std::array<double, 2> explained_fraction{};

  Point2 project(std::span<const double> stats) const;
};

// Loadings are the top-2 eigenvectors of the sample covariance, each signed
// so its largest-magnitude entry is positive. Requires n >= 3 and at least
// two usable statistics.
PcaProjection pca_fit(const ReferenceTable& table, const ScalingVector& scaling);

struct Envelope {
  double coverage = 0.9;
  std::vector<Point2> polygon;  // convex hull, counter-clockwise
  bool contains_observed = false;
};

// Keeps the ceil(coverage * n) scores nearest the centroid in Mahalanobis
// distance (Euclidean if the score covariance is singular) and returns their
// convex hull. The hull boundary counts as inside.
Envelope envelope(std::span<const Point2> scores, const Point2& observed,
                  double coverage);

// Andrew's monotone chain; collinear points on edges are dropped.
std::vector<Point2> convex_hull(std::vector<Point2> points);
bool convex_polygon_contains(std::span<const Point2> polygon,
                             const Point2& point);

// Columns pc1, pc2, kind (sim / observed).
void write_scores_tsv(std::ostream& out, std::span<const Point2> scores,
                      const Point2& observed);
// Columns pc1, pc2, one row per hull vertex in order.
void write_polygon_tsv(std::ostream& out, std::span<const Point2> polygon);

}  // namespace abcgof
