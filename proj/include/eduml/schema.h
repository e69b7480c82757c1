#ifndef EDUML_SCHEMA_H_
#define EDUML_SCHEMA_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eduml/table.h"

namespace eduml {

enum class ColumnRole { kKey, kFeature, kScore, kGroup, kIgnore };

const char* column_role_name(ColumnRole role);
ColumnRole parse_column_role(std::string_view name);

// Optional generator settings used by synth_generate. Categorical columns draw
// from `levels` with `weights`; numeric columns draw uniformly from
// [min, max] unless `sd` is set, in which case they are normal(mean, sd).
struct SynthSpec {
  std::vector<std::string> levels;
  std::vector<double> weights;
  double min = 0.0;
  double max = 1.0;
  std::optional<double> mean;
  std::optional<double> sd;
  double missing_fraction = 0.0;
};

struct ColumnSpec {
  std::string name;
  ColumnRole role = ColumnRole::kFeature;
  ColumnKind kind = ColumnKind::kNumeric;
  bool ordinal = false;
  std::vector<std::string> missing_tokens = {"", "NA", "N/A"};
  // Declared level order for ordinal categoricals (lowest rank first).
  std::vector<std::string> levels;
  SynthSpec synth;
};

class SchemaSpec {
 public:
  SchemaSpec() = default;
  explicit SchemaSpec(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const ColumnSpec* find(std::string_view name) const;
  const ColumnSpec& at(std::string_view name) const;

  void add(ColumnSpec spec);
  // Adds or replaces the declaration for spec.name.
  void upsert(ColumnSpec spec);

  std::vector<std::string> names_with_role(ColumnRole role) const;

  // Checks the role constraints: at most one key column, and exactly one
  // score column when `require_score` is set.
  void validate(bool require_score) const;

  // Declarations of both schemas; `other` wins on name clashes.
  SchemaSpec merged_with(const SchemaSpec& other) const;

 private:
  std::vector<ColumnSpec> columns_;
};

// Key-value schema file, one section per column:
//
//   # comment
//   [Quintile]
//   kind = categorical
//   role = feature
//   ordinal = true
//   levels = 1, 2, 3, 4, 5
//   missing = "", NA, N/A
//   synth.levels = 1, 2, 3, 4, 5
//   synth.weights = 0.3, 0.25, 0.2, 0.15, 0.1
//
// List values are comma separated; items may be double-quoted.
SchemaSpec parse_schema(std::string_view text);
SchemaSpec read_schema(const std::filesystem::path& path);
std::string format_schema(const SchemaSpec& schema);

}  // namespace eduml

#endif  // EDUML_SCHEMA_H_
