#include "abcgof/ppc.hpp"

#include <algorithm>
#include <ostream>

#include "abcgof/error.hpp"

namespace abcgof {
namespace {

std::vector<double> column_values(const Matrix& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = m(i, j);
  }
  return out;
}

void check_shape(const Matrix& replicates, const ObservedStats& observed) {
  if (replicates.rows() < 1) throw usage_error("ppc: need at least one replicate");
  if (static_cast<std::size_t>(replicates.cols()) != observed.values.size() ||
      observed.stat_names.size() != observed.values.size()) {
    throw usage_error("ppc: replicate columns do not match observed statistics");
  }
}

}  // namespace

PpcReport ppc_report(const Matrix& replicates, const ObservedStats& observed) {
  check_shape(replicates, observed);
  PpcReport report;
  const double n = static_cast<double>(replicates.rows());
  for (Eigen::Index j = 0; j < replicates.cols(); ++j) {
    StatCheck check;
    check.stat_name = observed.stat_names[static_cast<std::size_t>(j)];
    check.replicates = column_values(replicates, j);
    check.observed = observed.values[static_cast<std::size_t>(j)];
    std::size_t below = 0, above = 0;
    for (double r : check.replicates) {
      if (r <= check.observed) ++below;
      if (r >= check.observed) ++above;
    }
    check.lower_tail = static_cast<double>(below) / n;
    check.upper_tail = static_cast<double>(above) / n;
    check.two_sided =
        std::min(1.0, 2.0 * std::min(check.lower_tail, check.upper_tail));
    const auto [lo, hi] =
        std::minmax_element(check.replicates.begin(), check.replicates.end());
    check.outside_range = check.observed < *lo || check.observed > *hi;
    report.per_stat.push_back(std::move(check));
  }
  return report;
}

std::vector<HistogramBin> equal_width_histogram(const std::vector<double>& values,
                                                double lo, double hi,
                                                std::size_t bins) {
  if (bins == 0) throw usage_error("histogram: bins must be >= 1");
  if (!(hi >= lo)) throw usage_error("histogram: empty range");
  std::vector<HistogramBin> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double v : values) {
    std::size_t b = 0;
    if (width > 0.0) {
      const double pos = (v - lo) / width;
      b = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
    }
    ++out[b].count;
  }
  return out;
}

std::vector<StatHistogram> ppc_histogram_data(const Matrix& replicates,
                                              const ObservedStats& observed,
                                              std::size_t bins) {
  check_shape(replicates, observed);
  std::vector<StatHistogram> out;
  for (Eigen::Index j = 0; j < replicates.cols(); ++j) {
    StatHistogram h;
    h.stat_name = observed.stat_names[static_cast<std::size_t>(j)];
    h.observed = observed.values[static_cast<std::size_t>(j)];
    const auto values = column_values(replicates, j);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = std::min(*mn, h.observed);
    const double hi = std::max(*mx, h.observed);
    h.bins = equal_width_histogram(values, lo, hi, bins);
    out.push_back(std::move(h));
  }
  return out;
}

void write_histogram_tsv(std::ostream& out,
                         const std::vector<StatHistogram>& histograms) {
  out << "stat\tbin_lo\tbin_hi\tcount\n";
  for (const auto& h : histograms) {
    for (const auto& b : h.bins) {
      out << h.stat_name << '\t' << format_double(b.lo) << '\t'
          << format_double(b.hi) << '\t' << b.count << '\n';
    }
  }
}

}  // namespace abcgof
