#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abcgof/core.hpp"

namespace abcgof {

// Posterior predictive check of one statistic. Ties count in both tails.
struct StatCheck {
  std::string stat_name;
  std::vector<double> replicates;
  double observed = 0.0;
  double lower_tail = 0.0;  // #{rep <= obs} / n'
  double upper_tail = 0.0;  // #{rep >= obs} / n'
  double two_sided = 1.0;   // min(1, 2 * min(lower, upper))
  bool outside_range = false;
};

struct PpcReport {
  std::vector<StatCheck> per_stat;
};

// `replicates` is n' x k with columns in the order of observed.stat_names.
PpcReport ppc_report(const Matrix& replicates, const ObservedStats& observed);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct StatHistogram {
  std::string stat_name;
  std::vector<HistogramBin> bins;
  double observed = 0.0;
};

// Equal-width bins over [min, max] of the replicates and the observed value;
// the last bin is closed on the right. A zero-width range yields `bins`
// copies of the single point, with every count in the first.
std::vector<HistogramBin> equal_width_histogram(const std::vector<double>& values,
                                                double lo, double hi,
                                                std::size_t bins);

std::vector<StatHistogram> ppc_histogram_data(const Matrix& replicates,
                                              const ObservedStats& observed,
                                              std::size_t bins);

// Columns: stat, bin_lo, bin_hi, count.
void write_histogram_tsv(std::ostream& out,
                         const std::vector<StatHistogram>& histograms);

}  // namespace abcgof
