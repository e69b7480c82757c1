#ifndef EDUML_DESCRIPTIVE_H_
#define EDUML_DESCRIPTIVE_H_

#include <string>
#include <vector>

#include "eduml/table.h"

namespace eduml {

inline constexpr const char* kOverallGroup = "(overall)";

struct GroupSummaryRow {
  std::string group;
  std::string target;
  size_t n = 0;  // non-missing values
  double mean = 0.0;
  double median = 0.0;
};

// Mean and median per group level (all levels listed, even empty ones) and
// overall, over non-missing target values. Empty summaries are NaN.
std::vector<GroupSummaryRow> group_summary(const Table& table, const std::string& group,
                                           const std::vector<std::string>& targets);

struct FrequencyRow {
  std::string group;
  std::string level;
  size_t count = 0;
  double percent = 0.0;  // of the group's rows with a non-missing target
};

std::vector<FrequencyRow> frequency_table(const Table& table, const std::string& group,
                                          const std::string& target);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  size_t count = 0;
};

// Equal-width bins over [min, max] of the non-missing values; the last bin
// is closed on the right.
std::vector<HistogramBin> histogram(const std::vector<double>& values, size_t n_bins);

// NaN for empty input; mean of the central pair for even counts.
double median(std::vector<double> values);
double mean(const std::vector<double>& values);

std::string group_summary_csv(const std::vector<GroupSummaryRow>& rows);
std::string frequency_table_csv(const std::vector<FrequencyRow>& rows, const std::string& target);

}  // namespace eduml

#endif  // EDUML_DESCRIPTIVE_H_
