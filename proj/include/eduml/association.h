#ifndef EDUML_ASSOCIATION_H_
#define EDUML_ASSOCIATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "eduml/table.h"

namespace eduml {

// Counts over ordered row and column categories.
struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<int64_t> counts;  // row-major

  ContingencyTable() = default;
  ContingencyTable(std::vector<std::vector<int64_t>> rows);

  size_t n_rows() const { return row_labels.size(); }
  size_t n_cols() const { return col_labels.size(); }
  int64_t at(size_t i, size_t j) const { return counts[i * n_cols() + j]; }
  int64_t total() const;

  // Cross-tabulates two categorical columns using the given level orders
  // (empty = the column's own sorted levels). Rows missing either value are
  // skipped.
  static ContingencyTable from_columns(const Column& x, const Column& y,
                                       std::vector<std::string> x_order = {},
                                       std::vector<std::string> y_order = {});
};

struct AssociationResult {
  std::string test;
  double statistic = 0.0;
  double df = 0.0;   // NaN when not applicable
  double df2 = 0.0;  // second F degree of freedom; NaN otherwise
  double p_value = 1.0;
  std::vector<int64_t> sample_sizes;
  bool tie_corrected = false;
  int64_t concordant = 0;  // gamma only
  int64_t discordant = 0;
};

// gamma = (C - D) / (C + D); two-sided p from z = gamma * sqrt((C+D)/(N(1-gamma^2))).
AssociationResult gk_gamma(const ContingencyTable& table);

// H with mid-ranks, corrected for ties, chi-square p with k-1 df. With
// `exact`, p is the permutation probability of H >= observed (N <= 10).
AssociationResult kruskal_wallis(const std::vector<std::vector<double>>& groups,
                                 bool exact = false);
inline constexpr size_t kMaxExactKruskalN = 10;

AssociationResult anova_oneway(const std::vector<std::vector<double>>& groups);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> mid_ranks(const std::vector<double>& values);

}  // namespace eduml

#endif  // EDUML_ASSOCIATION_H_
