#include "eduml/transforms.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

#include "eduml/error.h"

namespace eduml {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Canonical key text per row; throws KeyMissing on a missing key cell.
std::vector<std::string> key_strings(const Column& key, const char* side) {
  std::vector<std::string> out(key.size());
  for (size_t r = 0; r < key.size(); ++r) {
    if (key.is_missing(r)) {
      throw Error(ErrorCode::kKeyMissing, std::string(side) + " key '" + key.name() +
                                              "' is missing on row " +
                                              std::to_string(r + 1));
    }
    out[r] = key.cell_string(r);
  }
  return out;
}

std::unordered_map<std::string, size_t> unique_index(
    const std::vector<std::string>& keys) {
  std::unordered_map<std::string, size_t> index;
  index.reserve(keys.size());
  for (size_t r = 0; r < keys.size(); ++r) {
    if (!index.emplace(keys[r], r).second) {
      throw Error(ErrorCode::kDuplicateKey, "key value " + keys[r]);
    }
  }
  return index;
}

// Groups rows by the canonical text of `group`, in first-appearance order.
struct Grouping {
  std::vector<size_t> first_row;             // representative row per group
  std::vector<std::vector<size_t>> members;  // rows per group
};

Grouping group_rows(const Column& group) {
  Grouping g;
  std::unordered_map<std::string, size_t> index;
  for (size_t r = 0; r < group.size(); ++r) {
    if (group.is_missing(r)) continue;
    auto [it, inserted] = index.emplace(group.cell_string(r), g.members.size());
    if (inserted) {
      g.first_row.push_back(r);
      g.members.emplace_back();
    }
    g.members[it->second].push_back(r);
  }
  return g;
}

}  // namespace

Table merge_on_key(const Table& left, const Table& right, const std::string& key,
                   JoinCardinality cardinality, const std::string& right_key) {
  const std::string& rkey = right_key.empty() ? key : right_key;
  const std::vector<std::string> lkeys = key_strings(left.column(key), "left");
  const std::vector<std::string> rkeys = key_strings(right.column(rkey), "right");
  if (cardinality == JoinCardinality::kOneToOne) unique_index(lkeys);
  const auto rindex = unique_index(rkeys);

  std::vector<size_t> lrows;
  std::vector<size_t> rrows;
  for (size_t r = 0; r < lkeys.size(); ++r) {
    auto it = rindex.find(lkeys[r]);
    if (it == rindex.end()) continue;
    lrows.push_back(r);
    rrows.push_back(it->second);
  }

  std::vector<Column> cols;
  for (const Column& c : left.columns()) cols.push_back(c.take(lrows));
  for (const Column& c : right.columns()) {
    if (c.name() == rkey) continue;
    cols.push_back(c.take(rrows));
  }
  return Table(std::move(cols));
}

Table mode_aggregate_by_group(const Table& table, const std::string& group,
                              const std::vector<std::string>& values) {
  const Column& gcol = table.column(group);
  for (const std::string& v : values) {
    if (!table.column(v).is_categorical()) {
      throw Error(ErrorCode::kTypeMismatch,
                  "mode aggregation needs a categorical column: '" + v + "'");
    }
  }
  const Grouping g = group_rows(gcol);
  if (g.members.empty()) {
    throw Error(ErrorCode::kEmptyGroupColumn,
                "group column '" + group + "' has no values");
  }

  std::vector<Column> cols;
  cols.push_back(gcol.take(g.first_row));
  for (const std::string& v : values) {
    const Column& col = table.column(v);
    std::vector<int32_t> codes;
    codes.reserve(g.members.size());
    std::vector<size_t> counts(col.levels().size());
    for (const auto& rows : g.members) {
      std::fill(counts.begin(), counts.end(), 0);
      for (size_t r : rows) {
        if (col.code(r) >= 0) ++counts[col.code(r)];
      }
      // Levels are sorted, so the first maximum is the smallest tied level.
      int32_t best = -1;
      size_t best_count = 0;
      for (size_t l = 0; l < counts.size(); ++l) {
        if (counts[l] > best_count) {
          best = static_cast<int32_t>(l);
          best_count = counts[l];
        }
      }
      codes.push_back(best);
    }
    cols.push_back(Column::categorical_from_codes(v, col.levels(), std::move(codes)));
  }
  return Table(std::move(cols));
}

AggregateSpec AggregateSpec::count(std::string output) {
  return {Kind::kCount, "", "", std::move(output)};
}

AggregateSpec AggregateSpec::count_where(std::string column, std::string level,
                                         std::string output) {
  return {Kind::kCountWhere, std::move(column), std::move(level), std::move(output)};
}

AggregateSpec AggregateSpec::mean(std::string column, std::string output) {
  return {Kind::kMean, std::move(column), "", std::move(output)};
}

std::string AggregateSpec::output_name() const {
  if (!output.empty()) return output;
  switch (kind) {
    case Kind::kCount: return "count";
    case Kind::kCountWhere: return column + "_" + level + "_count";
    case Kind::kMean: return column + "_mean";
  }
  return output;
}

Table count_aggregate_by_group(const Table& table, const std::string& key,
                               const std::vector<AggregateSpec>& spec,
                               const Table* keys_from) {
  const Column& kcol = table.column(key);
  for (const AggregateSpec& a : spec) {
    if (a.kind == AggregateSpec::Kind::kMean && !table.column(a.column).is_numeric()) {
      throw Error(ErrorCode::kTypeMismatch,
                  "mean aggregation needs a numeric column: '" + a.column + "'");
    }
    if (a.kind == AggregateSpec::Kind::kCountWhere) table.column(a.column);
  }

  const Grouping g = group_rows(kcol);
  std::unordered_map<std::string, size_t> group_of;
  for (size_t i = 0; i < g.first_row.size(); ++i) {
    group_of.emplace(kcol.cell_string(g.first_row[i]), i);
  }

  // Output key column and the member rows for each output row.
  Column out_key = kcol.take(g.first_row);
  std::vector<const std::vector<size_t>*> members;
  static const std::vector<size_t> kNoRows;
  if (keys_from != nullptr) {
    const Column& universe = keys_from->column(key);
    const auto ukeys = key_strings(universe, "universe");
    unique_index(ukeys);
    std::vector<size_t> all(universe.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    out_key = universe.take(all);
    for (const std::string& k : ukeys) {
      auto it = group_of.find(k);
      members.push_back(it == group_of.end() ? &kNoRows : &g.members[it->second]);
    }
  } else {
    for (const auto& m : g.members) members.push_back(&m);
  }

  std::vector<Column> cols;
  cols.push_back(std::move(out_key));
  for (const AggregateSpec& a : spec) {
    std::vector<double> values;
    values.reserve(members.size());
    for (const auto* rows : members) {
      switch (a.kind) {
        case AggregateSpec::Kind::kCount:
          values.push_back(static_cast<double>(rows->size()));
          break;
        case AggregateSpec::Kind::kCountWhere: {
          const Column& col = table.column(a.column);
          size_t n = 0;
          for (size_t r : *rows) {
            if (!col.is_missing(r) && col.cell_string(r) == a.level) ++n;
          }
          values.push_back(static_cast<double>(n));
          break;
        }
        case AggregateSpec::Kind::kMean: {
          const Column& col = table.column(a.column);
          double sum = 0.0;
          size_t n = 0;
          for (size_t r : *rows) {
            if (col.is_missing(r)) continue;
            sum += col.number(r);
            ++n;
          }
          values.push_back(n == 0 ? kNaN : sum / static_cast<double>(n));
          break;
        }
      }
    }
    if (a.kind == AggregateSpec::Kind::kMean) {
      cols.push_back(Column::numeric(a.output_name(), std::move(values)));
    } else {
      cols.push_back(Column::integer(a.output_name(), std::move(values)));
    }
  }
  return Table(std::move(cols));
}

SparseDropResult drop_sparse_columns(const Table& table, double max_missing_frac,
                                     const std::vector<std::string>& keep) {
  if (!(max_missing_frac >= 0.0 && max_missing_frac <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "max_missing_frac must lie in [0, 1]");
  }
  SparseDropResult result;
  std::vector<Column> cols;
  for (const Column& c : table.columns()) {
    const double frac =
        table.n_rows() == 0
            ? 0.0
            : static_cast<double>(c.missing_count()) / static_cast<double>(table.n_rows());
    const bool protect = std::find(keep.begin(), keep.end(), c.name()) != keep.end();
    if (frac > max_missing_frac && !protect) {
      result.dropped.push_back({c.name(), frac});
    } else {
      cols.push_back(c);
    }
  }
  result.table = cols.empty() ? Table() : Table(std::move(cols));
  return result;
}

LabelResult derive_label(const Table& table, const std::string& score,
                         const LabelRule& rule) {
  if (!(rule.threshold >= 0.0 && rule.threshold <= 100.0)) {
    throw Error(ErrorCode::kInvalidParameter, "label threshold must lie in [0, 100]");
  }
  if (table.has_column(kOutcomeColumn)) {
    throw Error(ErrorCode::kDuplicateColumn, "table already has an outcome column");
  }
  const Column& s = table.column(score);
  if (!s.is_numeric()) {
    throw Error(ErrorCode::kTypeMismatch, "score column '" + score + "' is not numeric");
  }
  LabelResult result;
  std::vector<size_t> kept;
  std::vector<int32_t> codes;  // levels: fail = 0, pass = 1
  for (size_t r = 0; r < s.size(); ++r) {
    const double v = s.number(r);
    if (std::isnan(v)) {
      ++result.dropped_missing_score;
      continue;
    }
    if (v < 0.0 || v > 100.0) {
      throw Error(ErrorCode::kScoreOutOfRange,
                  "score " + format_number(v) + " on row " + std::to_string(r + 1));
    }
    const bool pass = rule.pass_iff_geq ? v >= rule.threshold : v > rule.threshold;
    kept.push_back(r);
    codes.push_back(pass ? 1 : 0);
  }
  result.table = table.take_rows(kept).with_column(Column::categorical_from_codes(
      kOutcomeColumn, {kFailLevel, kPassLevel}, std::move(codes)));
  return result;
}

RatioResult add_ratio_column(const Table& table, const std::string& numerator,
                             const std::string& denominator, const std::string& name) {
  const Column& num = table.column(numerator);
  const Column& den = table.column(denominator);
  if (!num.is_numeric() || !den.is_numeric()) {
    throw Error(ErrorCode::kTypeMismatch, "ratio operands must be numeric");
  }
  RatioResult result;
  std::vector<double> values(table.n_rows(), kNaN);
  for (size_t r = 0; r < table.n_rows(); ++r) {
    const double a = num.number(r);
    const double b = den.number(r);
    if (std::isnan(a) || std::isnan(b)) continue;
    if (b == 0.0) {
      ++result.zero_denominator;
      continue;
    }
    values[r] = a / b;
  }
  result.table = table.with_column(Column::numeric(name, std::move(values)));
  return result;
}

std::string QuantileBins::label(int index, int precision) const {
  const double lo = index == 0 ? min : edges[index - 1];
  const double hi = index == static_cast<int>(edges.size()) ? max : edges[index];
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%c%.*f, %.*f]", index == 0 ? '[' : '(', precision,
                lo, precision, hi);
  return buf;
}

QuantileBins quantile_bin(const std::vector<double>& values, int k) {
  if (k < 2) throw Error(ErrorCode::kInvalidParameter, "quantile_bin needs k >= 2");
  std::vector<double> sorted;
  for (double v : values) {
    if (!std::isnan(v)) sorted.push_back(v);
  }
  std::sort(sorted.begin(), sorted.end());
  size_t n_distinct = sorted.empty() ? 0 : 1;
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] != sorted[i - 1]) ++n_distinct;
  }
  if (n_distinct < static_cast<size_t>(k)) {
    throw Error(ErrorCode::kDegenerateDistribution,
                std::to_string(n_distinct) + " distinct values for " +
                    std::to_string(k) + " bins");
  }

  QuantileBins out;
  out.min = sorted.front();
  out.max = sorted.back();
  const double last = static_cast<double>(sorted.size() - 1);
  for (int i = 1; i < k; ++i) {
    const double h = last * static_cast<double>(i) / static_cast<double>(k);
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    out.edges.push_back(sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
  }
  out.bin.reserve(values.size());
  for (double v : values) {
    if (std::isnan(v)) {
      out.bin.push_back(-1);
      continue;
    }
    // Number of edges strictly below v.
    out.bin.push_back(static_cast<int>(
        std::lower_bound(out.edges.begin(), out.edges.end(), v) - out.edges.begin()));
  }
  return out;
}

}  // namespace eduml
