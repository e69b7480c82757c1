#ifndef EDUML_DATASET_H_
#define EDUML_DATASET_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eduml/schema.h"
#include "eduml/table.h"

namespace eduml {

// Numeric outcome convention: fail is the positive class.
inline constexpr uint8_t kFail = 1;
inline constexpr uint8_t kPass = 0;

enum class EncodingMode {
  kTree,    // missing cells stay missing (NaN) for learned default directions
  kLinear,  // numeric medians imputed, missing categoricals go to the reference
};

const char* encoding_mode_name(EncodingMode mode);

// How one source column became model features.
struct EncodedColumn {
  enum class Kind { kNumeric, kOrdinal, kOneHot };

  std::string source;
  Kind kind = Kind::kNumeric;
  std::vector<std::string> produced;  // feature names, in matrix order
  // One-hot: level per produced column, plus the dropped reference level.
  std::vector<std::string> levels;
  std::string reference_level;
  // Ordinal: level text -> numeric rank.
  std::vector<std::pair<std::string, double>> ordinal_map;
  // Linear-mode imputation constant; NaN when none was needed.
  double impute_value = std::nan("");
};

struct EncodingMap {
  EncodingMode mode = EncodingMode::kTree;
  std::vector<EncodedColumn> columns;

  const EncodedColumn* find(std::string_view source) const;
};

// Row-major numeric feature matrix (NaN = missing), binary labels
// (kFail / kPass), and the metadata to map features back to source columns.
struct LabeledDataset {
  size_t n_rows = 0;
  size_t n_features = 0;
  std::vector<double> features;
  std::vector<uint8_t> labels;
  std::vector<std::string> feature_names;
  EncodingMap encoding;

  double at(size_t row, size_t feature) const {
    return features[row * n_features + feature];
  }
  bool is_missing(size_t row, size_t feature) const {
    return std::isnan(at(row, feature));
  }
  std::span<const double> row(size_t r) const {
    return {features.data() + r * n_features, n_features};
  }
  bool has_missing() const;
  size_t count(uint8_t label) const;

  LabeledDataset subset(std::span<const size_t> rows) const;

  // Throws SingleClass unless both outcomes occur.
  void require_both_classes() const;
};

// Builds the feature matrix from the schema's feature columns (table order).
// Ordinal categoricals become a single rank feature; other categoricals are
// one-hot encoded against their most frequent level (ties: smallest level).
// The `outcome` column supplies labels.
LabeledDataset encode_features(const Table& table, const SchemaSpec& schema,
                               EncodingMode mode);

// Encodes another table with a fitted map. Unseen categorical levels act like
// the reference (linear mode) or like missing (tree mode). The outcome column
// is optional; rows get kPass labels when it is absent.
LabeledDataset apply_encoding(const Table& table, const EncodingMap& encoding);

// Recovers the source category of a row from its encoded features; nullopt
// when the row was missing for that column.
std::optional<std::string> decode_categorical(const LabeledDataset& dataset,
                                              size_t row, const std::string& source);

// Row indices after undersampling the majority class to the minority count,
// in a seeded shuffled order.
std::vector<size_t> balanced_indices(std::span<const uint8_t> labels, uint64_t seed);
LabeledDataset balance_classes(const LabeledDataset& dataset, uint64_t seed);

}  // namespace eduml

#endif  // EDUML_DATASET_H_
