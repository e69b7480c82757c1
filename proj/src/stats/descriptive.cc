#include "eduml/descriptive.h"

#include <algorithm>
#include <cmath>

#include "eduml/csv.h"
#include "eduml/error.h"

namespace eduml {
namespace {

const Column& categorical_column(const Table& table, const std::string& name) {
  const Column& col = table.column(name);
  if (!col.is_categorical()) {
    throw Error(ErrorCode::kTypeMismatch, "column '" + name + "' must be categorical");
  }
  return col;
}

}  // namespace

double mean(const std::vector<double>& values) {
  if (values.empty()) return std::nan("");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<GroupSummaryRow> group_summary(const Table& table, const std::string& group,
                                           const std::vector<std::string>& targets) {
  const Column& g = categorical_column(table, group);
  std::vector<GroupSummaryRow> out;
  for (const std::string& target : targets) {
    const Column& t = table.column(target);
    if (!t.is_numeric()) {
      throw Error(ErrorCode::kTypeMismatch, "column '" + target + "' must be numeric");
    }
    std::vector<std::vector<double>> per_group(g.levels().size());
    std::vector<double> all;
    for (size_t r = 0; r < table.n_rows(); ++r) {
      const double v = t.number(r);
      if (std::isnan(v)) continue;
      all.push_back(v);
      if (g.code(r) >= 0) per_group[g.code(r)].push_back(v);
    }
    for (size_t k = 0; k < per_group.size(); ++k) {
      out.push_back({g.levels()[k], target, per_group[k].size(), mean(per_group[k]),
                     median(per_group[k])});
    }
    out.push_back({kOverallGroup, target, all.size(), mean(all), median(all)});
  }
  return out;
}

std::vector<FrequencyRow> frequency_table(const Table& table, const std::string& group,
                                          const std::string& target) {
  const Column& g = categorical_column(table, group);
  const Column& t = categorical_column(table, target);
  const size_t ng = g.levels().size();
  const size_t nt = t.levels().size();
  std::vector<size_t> counts(ng * nt, 0);
  std::vector<size_t> totals(ng, 0);
  for (size_t r = 0; r < table.n_rows(); ++r) {
    if (g.code(r) < 0 || t.code(r) < 0) continue;
    ++counts[static_cast<size_t>(g.code(r)) * nt + static_cast<size_t>(t.code(r))];
    ++totals[g.code(r)];
  }
  std::vector<FrequencyRow> out;
  for (size_t i = 0; i < ng; ++i) {
    for (size_t j = 0; j < nt; ++j) {
      const size_t c = counts[i * nt + j];
      const double pct = totals[i] ? 100.0 * static_cast<double>(c) / static_cast<double>(totals[i])
                                   : std::nan("");
      out.push_back({g.levels()[i], t.levels()[j], c, pct});
    }
  }
  return out;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, size_t n_bins) {
  if (n_bins == 0) throw Error(ErrorCode::kInvalidParameter, "histogram needs at least 1 bin");
  std::vector<double> v;
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  if (v.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<HistogramBin> bins(n_bins);
  for (size_t b = 0; b < n_bins; ++b) {
    bins[b].lo = lo + width * static_cast<double>(b);
    bins[b].hi = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double x : v) {
    size_t b = width > 0 ? static_cast<size_t>((x - lo) / width) : 0;
    b = std::min(b, n_bins - 1);
    // Floating-point edges: keep x inside [lo_b, hi_b).
    while (b > 0 && x < bins[b].lo) --b;
    while (b + 1 < n_bins && x >= bins[b + 1].lo) ++b;
    ++bins[b].count;
  }
  return bins;
}

std::string group_summary_csv(const std::vector<GroupSummaryRow>& rows) {
  std::string out = "target,group,n,mean,median\n";
  for (const GroupSummaryRow& r : rows) {
    out += csv_line({r.target, r.group, std::to_string(r.n), format_number(r.mean),
                     format_number(r.median)});
  }
  return out;
}

std::string frequency_table_csv(const std::vector<FrequencyRow>& rows, const std::string& target) {
  std::string out;
  for (const FrequencyRow& r : rows) {
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.1f", r.percent);
    out += csv_line({target, r.group, r.level, std::to_string(r.count),
                     std::isnan(r.percent) ? "" : pct});
  }
  return out;
}

}  // namespace eduml
