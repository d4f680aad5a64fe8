#include "abcgof/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "abcgof/diagnostics.hpp"
#include "abcgof/error.hpp"

namespace abcgof {
namespace {

void check_unique(const std::vector<std::string>& names, const char* what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw data_error(std::string("empty ") + what + " name");
    if (!seen.insert(n).second) {
      throw data_error(std::string("duplicate ") + what + " name '" + n + "'");
    }
  }
}

void check_finite(const Matrix& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        throw data_error(std::string("non-finite ") + what + " at row " +
                         std::to_string(i) + ", column " + std::to_string(j));
      }
    }
  }
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

struct ParsedTsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a header plus numeric rows. Line numbers in messages are 1-based file
// lines so they can be located in an editor.
ParsedTsv parse_tsv(std::istream& in, const std::string& source) {
  ParsedTsv out;
  std::string line;
  if (!std::getline(in, line)) {
    throw data_error(source + ": missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty()) throw data_error(source + ": missing header");
  out.header = split_tabs(line);

  std::size_t line_no = 1;
  std::vector<std::string> pending_blank;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      pending_blank.push_back(std::to_string(line_no));
      continue;
    }
    if (!pending_blank.empty()) {
      throw data_error(source + ": blank line " + pending_blank.front() +
                       " inside data");
    }
    const auto cells = split_tabs(line);
    if (cells.size() != out.header.size()) {
      throw data_error(source + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(out.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (first != last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, row[c]);
      if (ec != std::errc() || ptr != last || cell.empty()) {
        throw data_error(source + ": line " + std::to_string(line_no) +
                         ", column " + out.header[c] +
                         ": non-numeric cell '" + cell + "'");
      }
      if (!std::isfinite(row[c])) {
        throw data_error(source + ": line " + std::to_string(line_no) +
                         ", column " + out.header[c] +
                         ": non-finite value '" + cell + "'");
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path.string());
  return in;
}

}  // namespace

ReferenceTable::ReferenceTable(std::vector<std::string> param_names,
                               std::vector<std::string> stat_names,
                               Matrix params, Matrix stats)
    : param_names_(std::move(param_names)),
      stat_names_(std::move(stat_names)),
      params_(std::move(params)),
      stats_(std::move(stats)) {
  if (stats_.rows() < 2) {
    throw data_error("reference table needs at least 2 rows, got " +
                     std::to_string(stats_.rows()));
  }
  if (params_.rows() != stats_.rows()) {
    throw data_error("parameter and statistic row counts differ");
  }
  if (static_cast<std::size_t>(params_.cols()) != param_names_.size() ||
      static_cast<std::size_t>(stats_.cols()) != stat_names_.size()) {
    throw data_error("column count does not match the name list");
  }
  if (stat_names_.empty()) throw data_error("reference table has no statistics");
  check_unique(param_names_, "parameter");
  check_unique(stat_names_, "statistic");
  check_finite(params_, "parameter");
  check_finite(stats_, "statistic");
}

bool operator==(const ReferenceTable& a, const ReferenceTable& b) {
  return a.param_names_ == b.param_names_ && a.stat_names_ == b.stat_names_ &&
         a.params_.rows() == b.params_.rows() &&
         a.params_.cols() == b.params_.cols() &&
         a.stats_.cols() == b.stats_.cols() && a.params_ == b.params_ &&
         a.stats_ == b.stats_;
}

ScalingVector::ScalingVector(std::vector<double> scales)
    : scales_(std::move(scales)), inverse_(scales_.size(), 0.0) {
  for (std::size_t j = 0; j < scales_.size(); ++j) {
    if (!(scales_[j] >= 0.0) || !std::isfinite(scales_[j])) {
      throw data_error("invalid scale for statistic " + std::to_string(j));
    }
    if (scales_[j] == 0.0) {
      dropped_.push_back(j);
    } else {
      inverse_[j] = 1.0 / scales_[j];
    }
  }
  if (dropped_.size() == scales_.size()) {
    throw data_error("no informative statistics");
  }
}

ObservedStats ObservedStats::aligned_to(
    const std::vector<std::string>& names) const {
  if (stat_names.size() != values.size()) {
    throw data_error("observed statistics: names and values differ in length");
  }
  check_unique(stat_names, "observed statistic");
  ObservedStats out;
  out.stat_names = names;
  out.values.reserve(names.size());
  for (const auto& name : names) {
    const auto it = std::find(stat_names.begin(), stat_names.end(), name);
    if (it == stat_names.end()) {
      throw data_error("observed statistics lack '" + name + "'");
    }
    const double v = values[static_cast<std::size_t>(it - stat_names.begin())];
    if (!std::isfinite(v)) {
      throw data_error("observed statistic '" + name + "' is not finite");
    }
    out.values.push_back(v);
  }
  if (stat_names.size() != names.size()) {
    for (const auto& name : stat_names) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw data_error("observed statistic '" + name +
                         "' is not in the reference table");
      }
    }
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw data_error("median of empty vector");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double mad(std::span<const double> column) {
  if (column.empty()) throw data_error("empty statistic column");
  std::vector<double> values(column.begin(), column.end());
  const double center = median(values);
  for (auto& v : values) v = std::abs(v - center);
  return kMadConsistency * median(std::move(values));
}

ScalingVector fit_scaling(const Matrix& stats,
                          const std::vector<std::string>& stat_names) {
  std::vector<double> scales(static_cast<std::size_t>(stats.cols()));
  std::vector<double> column(static_cast<std::size_t>(stats.rows()));
  for (Eigen::Index j = 0; j < stats.cols(); ++j) {
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
      column[static_cast<std::size_t>(i)] = stats(i, j);
    }
    scales[static_cast<std::size_t>(j)] = mad(column);
  }
  ScalingVector scaling(std::move(scales));
  if (!scaling.dropped().empty()) {
    std::string names;
    for (auto j : scaling.dropped()) {
      if (!names.empty()) names += ", ";
      names += j < stat_names.size() ? stat_names[j] : std::to_string(j);
    }
    warn("dropping zero-MAD statistics: " + names);
  }
  return scaling;
}

ScalingVector fit_scaling(const ReferenceTable& table) {
  return fit_scaling(table.stats(), table.stat_names());
}

double distance(std::span<const double> a, std::span<const double> b,
                const ScalingVector& scaling) {
  if (a.size() != b.size() || a.size() != scaling.size()) {
    throw usage_error("distance: length mismatch (" +
                      std::to_string(a.size()) + ", " +
                      std::to_string(b.size()) + ", scaling " +
                      std::to_string(scaling.size()) + ")");
  }
  const auto& inv = scaling.inverse();
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = (a[j] - b[j]) * inv[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw data_error("cannot format value");
  return std::string(buf, ptr);
}

ReferenceTable read_reference_table(std::istream& in,
                                    const std::string& source) {
  auto parsed = parse_tsv(in, source);
  std::vector<std::size_t> param_cols, stat_cols;
  std::vector<std::string> param_names, stat_names;
  for (std::size_t c = 0; c < parsed.header.size(); ++c) {
    const auto& h = parsed.header[c];
    if (starts_with(h, kParamPrefix)) {
      param_cols.push_back(c);
      param_names.push_back(h.substr(kParamPrefix.size()));
    } else if (starts_with(h, kStatPrefix)) {
      stat_cols.push_back(c);
      stat_names.push_back(h.substr(kStatPrefix.size()));
    } else {
      throw data_error(source + ": column '" + h +
                       "' has neither a param_ nor a stat_ prefix");
    }
  }
  if (stat_cols.empty()) throw data_error(source + ": no stat_ columns");
  const auto n = static_cast<Eigen::Index>(parsed.rows.size());
  Matrix params(n, static_cast<Eigen::Index>(param_cols.size()));
  Matrix stats(n, static_cast<Eigen::Index>(stat_cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = parsed.rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < param_cols.size(); ++c) {
      params(i, static_cast<Eigen::Index>(c)) = row[param_cols[c]];
    }
    for (std::size_t c = 0; c < stat_cols.size(); ++c) {
      stats(i, static_cast<Eigen::Index>(c)) = row[stat_cols[c]];
    }
  }
  try {
    return ReferenceTable(std::move(param_names), std::move(stat_names),
                          std::move(params), std::move(stats));
  } catch (const Error& e) {
    throw data_error(source + ": " + e.what());
  }
}

ReferenceTable load_reference_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_reference_table(in, path.string());
}

void write_reference_table(std::ostream& out, const ReferenceTable& table) {
  bool first = true;
  auto sep = [&] {
    if (!first) out << '\t';
    first = false;
  };
  for (const auto& n : table.param_names()) {
    sep();
    out << kParamPrefix << n;
  }
  for (const auto& n : table.stat_names()) {
    sep();
    out << kStatPrefix << n;
  }
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    first = true;
    for (double v : table.param_row(i)) {
      sep();
      out << format_double(v);
    }
    for (double v : table.stat_row(i)) {
      sep();
      out << format_double(v);
    }
    out << '\n';
  }
}

void save_reference_table(const std::filesystem::path& path,
                          const ReferenceTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  write_reference_table(out, table);
}

StatMatrix read_stat_matrix(std::istream& in, const std::string& source) {
  auto parsed = parse_tsv(in, source);
  StatMatrix out;
  for (const auto& h : parsed.header) {
    if (!starts_with(h, kStatPrefix)) {
      throw data_error(source + ": column '" + h +
                       "' is not a stat_ column");
    }
    out.stat_names.push_back(h.substr(kStatPrefix.size()));
  }
  check_unique(out.stat_names, "statistic");
  out.values.resize(static_cast<Eigen::Index>(parsed.rows.size()),
                    static_cast<Eigen::Index>(parsed.header.size()));
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    for (std::size_t c = 0; c < parsed.header.size(); ++c) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          parsed.rows[i][c];
    }
  }
  return out;
}

StatMatrix load_stat_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_stat_matrix(in, path.string());
}

void write_stat_matrix(std::ostream& out,
                       const std::vector<std::string>& stat_names,
                       const Matrix& values) {
  for (std::size_t j = 0; j < stat_names.size(); ++j) {
    if (j) out << '\t';
    out << kStatPrefix << stat_names[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

ObservedStats read_observed(std::istream& in, const std::string& source) {
  auto m = read_stat_matrix(in, source);
  if (m.values.rows() != 1) {
    throw data_error(source + ": observed file must have exactly one data row, "
                              "found " + std::to_string(m.values.rows()));
  }
  ObservedStats out;
  out.stat_names = std::move(m.stat_names);
  out.values.assign(m.values.data(), m.values.data() + m.values.cols());
  return out;
}

ObservedStats load_observed(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_observed(in, path.string());
}

void write_observed(std::ostream& out, const ObservedStats& observed) {
  Matrix row(1, static_cast<Eigen::Index>(observed.values.size()));
  for (std::size_t j = 0; j < observed.values.size(); ++j) {
    row(0, static_cast<Eigen::Index>(j)) = observed.values[j];
  }
  write_stat_matrix(out, observed.stat_names, row);
}

}  // namespace abcgof
