#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abcgof/core.hpp"
#include "abcgof/rng.hpp"

namespace testing_helpers {

using abcgof::Matrix;
using abcgof::ReferenceTable;

inline Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

inline std::vector<std::string> names(const std::string& stem, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < k; ++j) out.push_back(stem + std::to_string(j));
  return out;
}

// Statistics given row by row; one parameter column holding the row index.
inline ReferenceTable table_from_stats(
    const std::vector<std::vector<double>>& stats) {
  std::vector<std::vector<double>> params;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    params.push_back({static_cast<double>(i)});
  }
  return ReferenceTable({"theta"}, names("s", stats[0].size()),
                        to_matrix(params), to_matrix(stats));
}

inline std::vector<std::vector<double>> random_rows(abcgof::Rng& rng,
                                                    std::size_t n,
                                                    std::size_t k) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(k));
  for (auto& r : rows) {
    for (auto& x : r) x = rng.normal() * (1.0 + rng.uniform());
  }
  return rows;
}

inline std::vector<double> row(const Matrix& m, Eigen::Index i) {
  return {m.row(i).data(), m.row(i).data() + m.cols()};
}

}  // namespace testing_helpers
