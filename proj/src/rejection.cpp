#include "abcgof/rejection.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "abcgof/diagnostics.hpp"
#include "abcgof/error.hpp"

namespace abcgof {

std::size_t accepted_count(double rate, std::size_t n) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw usage_error("acceptance rate must lie in (0, 1], got " +
                      format_double(rate));
  }
  if (n == 0) throw data_error("empty reference table after exclusion");
  // The small offset absorbs representation error such as 0.29 * 100 =
  // 28.999999999999996.
  const double scaled = std::floor(rate * static_cast<double>(n) + 1e-9);
  const auto count = static_cast<std::size_t>(std::min(scaled, double(n)));
  if (count == 0) {
    warn("acceptance rate " + format_double(rate) + " keeps no row out of " +
         std::to_string(n) + "; accepting the single nearest row");
    return 1;
  }
  return count;
}

AcceptanceSet reject(const ReferenceTable& table,
                     std::span<const double> observed,
                     const ScalingVector& scaling, double rate,
                     std::optional<std::size_t> exclude) {
  const std::size_t n = table.rows();
  if (observed.size() != table.num_stats()) {
    throw usage_error("observed vector has " + std::to_string(observed.size()) +
                      " statistics, table has " +
                      std::to_string(table.num_stats()));
  }
  if (exclude && *exclude >= n) {
    throw usage_error("excluded row " + std::to_string(*exclude) +
                      " is out of range");
  }
  const std::size_t effective = exclude ? n - 1 : n;
  const std::size_t keep = accepted_count(rate, effective);

  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(effective);
  for (std::size_t i = 0; i < n; ++i) {
    if (exclude && i == *exclude) continue;
    candidates.emplace_back(distance(table.stat_row(i), observed, scaling), i);
  }
  // Pairs compare by (distance, index), which fixes the boundary tie-break.
  if (keep < candidates.size()) {
    std::nth_element(candidates.begin(),
                     candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                     candidates.end());
  }
  candidates.resize(keep);
  std::sort(candidates.begin(), candidates.end());

  AcceptanceSet out;
  out.acceptance_rate = rate;
  out.indices.reserve(keep);
  out.distances.reserve(keep);
  for (const auto& [d, i] : candidates) {
    out.distances.push_back(d);
    out.indices.push_back(i);
  }
  return out;
}

AcceptanceSet reject(const ReferenceTable& table, const ObservedStats& observed,
                     const ScalingVector& scaling, double rate,
                     std::optional<std::size_t> exclude) {
  const auto aligned = observed.aligned_to(table.stat_names());
  return reject(table, aligned.values, scaling, rate, exclude);
}

}  // namespace abcgof
