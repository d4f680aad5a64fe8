#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "abcgof/core.hpp"

namespace abcgof {

// Rows of a reference table accepted by the rejection algorithm, nearest
// first. Ties in distance are ordered by row index.
struct AcceptanceSet {
  std::vector<std::size_t> indices;
  std::vector<double> distances;
  double acceptance_rate = 1.0;
};

// max(1, floor(rate * n)). Warns when the floor is 0 and gets clamped.
std::size_t accepted_count(double rate, std::size_t n);

// Accepts the floor(rate * n) rows nearest to `observed` (already aligned to
// the table's statistic order). `exclude` removes one row from the table
// first, leaving n - 1 candidates.
AcceptanceSet reject(const ReferenceTable& table,
                     std::span<const double> observed,
                     const ScalingVector& scaling, double rate,
                     std::optional<std::size_t> exclude = std::nullopt);

// Name-aligning overload.
AcceptanceSet reject(const ReferenceTable& table, const ObservedStats& observed,
                     const ScalingVector& scaling, double rate,
                     std::optional<std::size_t> exclude = std::nullopt);

}  // namespace abcgof
