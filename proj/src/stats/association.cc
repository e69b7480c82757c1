#include "eduml/association.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "eduml/error.h"
#include "eduml/special_functions.h"

namespace eduml {
namespace {

std::vector<int64_t> group_sizes(const std::vector<std::vector<double>>& groups) {
  std::vector<int64_t> out;
  for (const auto& g : groups) out.push_back(static_cast<int64_t>(g.size()));
  return out;
}

void require_groups(const std::vector<std::vector<double>>& groups, size_t min_total) {
  if (groups.size() < 2) throw Error(ErrorCode::kInvalidParameter, "need at least 2 groups");
  size_t total = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw Error(ErrorCode::kInvalidParameter, "groups must be nonempty");
    for (double v : g) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidParameter, "values must be finite");
    }
    total += g.size();
  }
  if (total < min_total) {
    throw Error(ErrorCode::kInvalidParameter,
                "need at least " + std::to_string(min_total) + " observations");
  }
}

// (N - 1) * sum n_i (rbar_i - rbar)^2 / sum (r - rbar)^2, which equals the
// tie-corrected H.
double h_statistic(const std::vector<double>& ranks, const std::vector<size_t>& group_of,
                   size_t k) {
  const double n = static_cast<double>(ranks.size());
  const double rbar = (n + 1.0) / 2.0;
  std::vector<double> sum(k, 0.0);
  std::vector<double> count(k, 0.0);
  double total_ss = 0.0;
  for (size_t i = 0; i < ranks.size(); ++i) {
    sum[group_of[i]] += ranks[i];
    count[group_of[i]] += 1.0;
    total_ss += (ranks[i] - rbar) * (ranks[i] - rbar);
  }
  double between = 0.0;
  for (size_t g = 0; g < k; ++g) {
    const double dev = sum[g] / count[g] - rbar;
    between += count[g] * dev * dev;
  }
  return (n - 1.0) * between / total_ss;
}

}  // namespace

ContingencyTable::ContingencyTable(std::vector<std::vector<int64_t>> rows) {
  const size_t c = rows.empty() ? 0 : rows[0].size();
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != c) throw Error(ErrorCode::kInvalidParameter, "ragged table");
    row_labels.push_back(std::to_string(i + 1));
    for (int64_t v : rows[i]) {
      if (v < 0) throw Error(ErrorCode::kInvalidParameter, "negative count");
      counts.push_back(v);
    }
  }
  for (size_t j = 0; j < c; ++j) col_labels.push_back(std::to_string(j + 1));
}

int64_t ContingencyTable::total() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

ContingencyTable ContingencyTable::from_columns(const Column& x, const Column& y,
                                                std::vector<std::string> x_order,
                                                std::vector<std::string> y_order) {
  if (x.kind() != ColumnKind::kCategorical || y.kind() != ColumnKind::kCategorical) {
    throw Error(ErrorCode::kTypeMismatch, "contingency tables need categorical columns");
  }
  if (x_order.empty()) x_order = x.levels();
  if (y_order.empty()) y_order = y.levels();
  auto index_map = [](const Column& col, const std::vector<std::string>& order) {
    std::vector<int> map(col.levels().size(), -1);
    for (size_t i = 0; i < order.size(); ++i) {
      if (auto code = col.level_code(order[i])) map[*code] = static_cast<int>(i);
    }
    for (size_t c = 0; c < map.size(); ++c) {
      if (map[c] < 0) {
        throw Error(ErrorCode::kSchemaError, "level '" + col.levels()[c] + "' of column '" +
                                                 col.name() + "' missing from the level order");
      }
    }
    return map;
  };
  const std::vector<int> xi = index_map(x, x_order);
  const std::vector<int> yi = index_map(y, y_order);
  ContingencyTable t;
  t.row_labels = std::move(x_order);
  t.col_labels = std::move(y_order);
  t.counts.assign(t.n_rows() * t.n_cols(), 0);
  for (size_t r = 0; r < x.size(); ++r) {
    const int a = x.code(r);
    const int b = y.code(r);
    if (a < 0 || b < 0) continue;
    ++t.counts[static_cast<size_t>(xi[a]) * t.n_cols() + static_cast<size_t>(yi[b])];
  }
  return t;
}

AssociationResult gk_gamma(const ContingencyTable& table) {
  const size_t r = table.n_rows();
  const size_t c = table.n_cols();
  if (r < 2 || c < 2) {
    throw Error(ErrorCode::kDegenerateTable, "gamma needs at least 2 rows and 2 columns");
  }
  // below[i][j] = sum of counts with row > i; split by column side.
  int64_t concordant = 0;
  int64_t discordant = 0;
  // Suffix sums over rows below, then prefix/suffix over columns.
  std::vector<int64_t> below(c, 0);
  for (size_t i = r; i-- > 0;) {
    std::vector<int64_t> right(c + 1, 0);  // right[j] = sum below[j..]
    for (size_t j = c; j-- > 0;) right[j] = right[j + 1] + below[j];
    int64_t left = 0;  // sum below[0..j-1]
    for (size_t j = 0; j < c; ++j) {
      const int64_t n = table.at(i, j);
      concordant += n * right[j + 1];
      discordant += n * left;
      left += below[j];
    }
    for (size_t j = 0; j < c; ++j) below[j] += table.at(i, j);
  }
  if (concordant + discordant == 0) {
    throw Error(ErrorCode::kDegenerateTable, "no concordant or discordant pairs");
  }
  AssociationResult out;
  out.test = "gk_gamma";
  out.concordant = concordant;
  out.discordant = discordant;
  out.statistic = static_cast<double>(concordant - discordant) /
                  static_cast<double>(concordant + discordant);
  out.df = std::nan("");
  out.df2 = std::nan("");
  const double n = static_cast<double>(table.total());
  const double g = std::clamp(out.statistic, -(1.0 - 1e-12), 1.0 - 1e-12);
  const double z = g * std::sqrt(static_cast<double>(concordant + discordant) / (n * (1.0 - g * g)));
  out.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
  out.sample_sizes = {table.total()};
  return out;
}

std::vector<double> mid_ranks(const std::vector<double>& values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

AssociationResult kruskal_wallis(const std::vector<std::vector<double>>& groups, bool exact) {
  require_groups(groups, 3);
  std::vector<double> pooled;
  std::vector<size_t> group_of;
  for (size_t g = 0; g < groups.size(); ++g) {
    for (double v : groups[g]) {
      pooled.push_back(v);
      group_of.push_back(g);
    }
  }
  const std::vector<double> ranks = mid_ranks(pooled);
  const double n = static_cast<double>(pooled.size());
  const double rbar = (n + 1.0) / 2.0;
  double total_ss = 0.0;
  for (double r : ranks) total_ss += (r - rbar) * (r - rbar);
  if (total_ss == 0.0) throw Error(ErrorCode::kAllValuesIdentical, "all values are tied");

  AssociationResult out;
  out.test = "kruskal_wallis";
  out.statistic = h_statistic(ranks, group_of, groups.size());
  out.df = static_cast<double>(groups.size() - 1);
  out.df2 = std::nan("");
  out.sample_sizes = group_sizes(groups);
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  out.tie_corrected = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();

  if (!exact) {
    out.p_value = chi_square_sf(out.statistic, out.df);
    return out;
  }
  if (pooled.size() > kMaxExactKruskalN) {
    throw Error(ErrorCode::kInvalidParameter, "exact Kruskal-Wallis supports N <= 10");
  }
  // Enumerate every assignment of the pooled ranks to groups of the observed sizes.
  std::vector<size_t> remaining(groups.size());
  for (size_t g = 0; g < groups.size(); ++g) remaining[g] = groups[g].size();
  std::vector<size_t> assign(ranks.size());
  double hits = 0.0;
  double total = 0.0;
  const double observed = out.statistic;
  std::function<void(size_t)> visit = [&](size_t i) {
    if (i == ranks.size()) {
      total += 1.0;
      if (h_statistic(ranks, assign, groups.size()) >= observed - 1e-12) hits += 1.0;
      return;
    }
    for (size_t g = 0; g < remaining.size(); ++g) {
      if (remaining[g] == 0) continue;
      --remaining[g];
      assign[i] = g;
      visit(i + 1);
      ++remaining[g];
    }
  };
  visit(0);
  out.p_value = hits / total;
  return out;
}

AssociationResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  require_groups(groups, 0);
  double n = 0.0;
  double grand = 0.0;
  for (const auto& g : groups) {
    for (double v : g) grand += v;
    n += static_cast<double>(g.size());
  }
  const double k = static_cast<double>(groups.size());
  if (n - k < 1.0) throw Error(ErrorCode::kInvalidParameter, "within-group df must be >= 1");
  grand /= n;
  double ssb = 0.0;
  double ssw = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) ssw += (v - mean) * (v - mean);
  }
  AssociationResult out;
  out.test = "anova";
  out.df = k - 1.0;
  out.df2 = n - k;
  out.sample_sizes = group_sizes(groups);
  if (ssw == 0.0) {
    if (ssb == 0.0) {
      throw Error(ErrorCode::kZeroWithinVariance, "all groups constant at the same value");
    }
    out.statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.statistic = (ssb / out.df) / (ssw / out.df2);
  out.p_value = f_sf(out.statistic, out.df, out.df2);
  return out;
}

}  // namespace eduml
