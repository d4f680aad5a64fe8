#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abcgof {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kMadConsistency = 1.4826;
inline constexpr std::string_view kParamPrefix = "param_";
inline constexpr std::string_view kStatPrefix = "stat_";

inline std::span<const double> row_span(const Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

// n rows of (parameter vector, summary-statistic vector) drawn from the prior
// predictive distribution. Immutable once constructed; the constructor
// enforces n >= 2, matching name/column counts, unique names and finite
// entries.
class ReferenceTable {
 public:
  ReferenceTable(std::vector<std::string> param_names,
                 std::vector<std::string> stat_names, Matrix params,
                 Matrix stats);

  std::size_t rows() const { return static_cast<std::size_t>(stats_.rows()); }
  std::size_t num_params() const { return param_names_.size(); }
  std::size_t num_stats() const { return stat_names_.size(); }

  const std::vector<std::string>& param_names() const { return param_names_; }
  const std::vector<std::string>& stat_names() const { return stat_names_; }
  const Matrix& params() const { return params_; }
  const Matrix& stats() const { return stats_; }

  std::span<const double> stat_row(std::size_t i) const {
    return row_span(stats_, static_cast<Eigen::Index>(i));
  }
  std::span<const double> param_row(std::size_t i) const {
    return row_span(params_, static_cast<Eigen::Index>(i));
  }

  friend bool operator==(const ReferenceTable& a, const ReferenceTable& b);

 private:
  std::vector<std::string> param_names_;
  std::vector<std::string> stat_names_;
  Matrix params_;
  Matrix stats_;
};

// Per-statistic MAD scales. Statistics with zero MAD are listed in `dropped`
// and carry no weight in distances.
class ScalingVector {
 public:
  // Throws "no informative statistics" when every scale is zero.
  explicit ScalingVector(std::vector<double> scales);

  std::size_t size() const { return scales_.size(); }
  const std::vector<double>& scales() const { return scales_; }
  const std::vector<std::size_t>& dropped() const { return dropped_; }
  bool is_dropped(std::size_t j) const { return inverse_[j] == 0.0; }
  // 1/scale for usable statistics, 0 for dropped ones.
  const std::vector<double>& inverse() const { return inverse_; }

 private:
  std::vector<double> scales_;
  std::vector<std::size_t> dropped_;
  std::vector<double> inverse_;
};

// Observed summary statistics, stored in the statistic order of whatever
// table they were aligned to.
struct ObservedStats {
  std::vector<std::string> stat_names;
  std::vector<double> values;

  // Reorders to `names` by name. Throws on any missing, extra or duplicate
  // name, or a non-finite value.
  ObservedStats aligned_to(const std::vector<std::string>& names) const;
};

double median(std::vector<double> values);

// Median absolute deviation times 1.4826. Throws "empty statistic column".
double mad(std::span<const double> column);

// Fits MAD scales on the table's statistic columns and warns about dropped
// statistics by name.
ScalingVector fit_scaling(const ReferenceTable& table);
ScalingVector fit_scaling(const Matrix& stats,
                          const std::vector<std::string>& stat_names);

// Euclidean distance over non-dropped coordinates, each divided by its scale.
double distance(std::span<const double> a, std::span<const double> b,
                const ScalingVector& scaling);

// TSV reference tables: header of param_* then stat_* columns, C-locale
// decimals, no missing values.
ReferenceTable read_reference_table(std::istream& in,
                                    const std::string& source = "<stream>");
ReferenceTable load_reference_table(const std::filesystem::path& path);
void write_reference_table(std::ostream& out, const ReferenceTable& table);
void save_reference_table(const std::filesystem::path& path,
                          const ReferenceTable& table);

// Observed statistics: stat_* columns only, exactly one data row.
ObservedStats read_observed(std::istream& in,
                            const std::string& source = "<stream>");
ObservedStats load_observed(const std::filesystem::path& path);
void write_observed(std::ostream& out, const ObservedStats& observed);

// A stat_*-only TSV with any number of rows (e.g. posterior replicates).
struct StatMatrix {
  std::vector<std::string> stat_names;
  Matrix values;
};
StatMatrix read_stat_matrix(std::istream& in,
                            const std::string& source = "<stream>");
StatMatrix load_stat_matrix(const std::filesystem::path& path);
void write_stat_matrix(std::ostream& out,
                       const std::vector<std::string>& stat_names,
                       const Matrix& values);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace abcgof
