#ifndef EDUML_TRANSFORMS_H_
#define EDUML_TRANSFORMS_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "eduml/schema.h"
#include "eduml/table.h"

namespace eduml {

// Reads a CSV file typed by `schema`. Every file column must be declared
// (UnknownColumnInSchema otherwise); columns with role `ignore` are dropped;
// declared columns absent from the file raise MissingColumn. Cells equal to
// one of the column's missing tokens (after trimming blanks) become missing.
Table read_table(const std::filesystem::path& path, const SchemaSpec& schema);
Table parse_table(std::string_view csv_text, const SchemaSpec& schema);

enum class JoinCardinality {
  kOneToOne,   // keys unique on both sides
  kManyToOne,  // keys unique on the right only (lookup join)
};

// Inner join. Output holds the left columns followed by the right non-key
// columns; row order follows the left table. `right_key` defaults to `key`.
Table merge_on_key(const Table& left, const Table& right, const std::string& key,
                   JoinCardinality cardinality = JoinCardinality::kOneToOne,
                   const std::string& right_key = "");

// One row per distinct group value (first-appearance order). Each value column
// becomes its within-group mode over non-missing cells; ties go to the
// lexicographically smallest level. Rows with a missing group are skipped.
Table mode_aggregate_by_group(const Table& table, const std::string& group,
                              const std::vector<std::string>& values);

struct AggregateSpec {
  enum class Kind { kCount, kCountWhere, kMean };
  Kind kind = Kind::kCount;
  std::string column;  // count-where / mean target
  std::string level;   // count-where level
  std::string output;  // output column name; derived when empty

  static AggregateSpec count(std::string output = "count");
  static AggregateSpec count_where(std::string column, std::string level,
                                   std::string output = "");
  static AggregateSpec mean(std::string column, std::string output = "");
  std::string output_name() const;
};

// Group-wise counts and means keyed by `key`. When `keys_from` is given the
// output has exactly its key values, in its order, and keys without rows get
// count 0 and a missing mean; otherwise keys appear in first-appearance order.
Table count_aggregate_by_group(const Table& table, const std::string& key,
                               const std::vector<AggregateSpec>& spec,
                               const Table* keys_from = nullptr);

struct DroppedColumn {
  std::string name;
  double missing_fraction = 0.0;
};

struct SparseDropResult {
  Table table;
  std::vector<DroppedColumn> dropped;
};

// Removes columns whose missing fraction is strictly greater than
// `max_missing_frac`. Columns listed in `keep` are never removed.
SparseDropResult drop_sparse_columns(const Table& table, double max_missing_frac,
                                     const std::vector<std::string>& keep = {});

struct LabelRule {
  double threshold = 50.0;
  bool pass_iff_geq = true;
};

inline constexpr const char* kOutcomeColumn = "outcome";
inline constexpr const char* kFailLevel = "fail";
inline constexpr const char* kPassLevel = "pass";

struct LabelResult {
  Table table;
  size_t dropped_missing_score = 0;
};

// Adds the categorical `outcome` column {fail, pass}. Rows with a missing
// score are removed and counted.
LabelResult derive_label(const Table& table, const std::string& score,
                         const LabelRule& rule = {});

struct RatioResult {
  Table table;
  size_t zero_denominator = 0;
};

RatioResult add_ratio_column(const Table& table, const std::string& numerator,
                             const std::string& denominator,
                             const std::string& name);

struct QuantileBins {
  std::vector<int> bin;         // per value; -1 for NaN
  std::vector<double> edges;    // k - 1 interior edges
  double min = 0.0;
  double max = 0.0;

  // "[6.4, 31.3]" for the first bin, "(31.3, 47.4]" afterwards.
  std::string label(int index, int precision = 1) const;
};

// Linear-interpolation quantiles of the non-missing values. Bin 0 is closed
// on both ends, later bins are left-open and right-closed.
QuantileBins quantile_bin(const std::vector<double>& values, int k);

}  // namespace eduml

#endif  // EDUML_TRANSFORMS_H_
