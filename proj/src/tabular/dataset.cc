#include "eduml/dataset.h"

#include <algorithm>
#include <charconv>
#include <limits>

#include "eduml/error.h"
#include "eduml/rng.h"
#include "eduml/transforms.h"

namespace eduml {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n == 0) return kNaN;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::pair<std::string, double>> ordinal_ranks(const Column& col,
                                                          const ColumnSpec& spec) {
  std::vector<std::pair<std::string, double>> map;
  if (!spec.levels.empty()) {
    for (size_t i = 0; i < spec.levels.size(); ++i) {
      map.emplace_back(spec.levels[i], static_cast<double>(i + 1));
    }
    for (const std::string& level : col.levels()) {
      if (std::none_of(map.begin(), map.end(),
                       [&](const auto& p) { return p.first == level; })) {
        throw Error(ErrorCode::kSchemaError, "level '" + level + "' of ordinal column '" +
                                                 col.name() +
                                                 "' is missing from its declared order");
      }
    }
    return map;
  }
  bool numeric = true;
  for (const std::string& level : col.levels()) numeric = numeric && as_number(level);
  for (size_t i = 0; i < col.levels().size(); ++i) {
    const std::string& level = col.levels()[i];
    map.emplace_back(level, numeric ? *as_number(level) : static_cast<double>(i + 1));
  }
  return map;
}

std::optional<double> lookup_rank(const EncodedColumn& enc, const std::string& level) {
  for (const auto& [name, rank] : enc.ordinal_map) {
    if (name == level) return rank;
  }
  return std::nullopt;
}

std::vector<uint8_t> outcome_labels(const Table& table) {
  const Column& outcome = table.column(kOutcomeColumn);
  if (!outcome.is_categorical()) {
    throw Error(ErrorCode::kTypeMismatch, "outcome column must be categorical");
  }
  std::vector<uint8_t> labels(table.n_rows());
  for (size_t r = 0; r < table.n_rows(); ++r) {
    const std::string level = outcome.cell_string(r);
    if (level == kFailLevel) {
      labels[r] = kFail;
    } else if (level == kPassLevel) {
      labels[r] = kPass;
    } else {
      throw Error(ErrorCode::kMalformedCell,
                  "outcome on row " + std::to_string(r + 1) + " is '" + level +
                      "', expected fail or pass");
    }
  }
  return labels;
}

// Writes the encoded features of one source column into `out` (row-major,
// `stride` features per row, starting at `offset`).
void fill_column(const Column& col, const EncodedColumn& enc, EncodingMode mode,
                 std::vector<double>& out, size_t stride, size_t offset) {
  const size_t n = col.size();
  switch (enc.kind) {
    case EncodedColumn::Kind::kNumeric: {
      if (!col.is_numeric()) {
        throw Error(ErrorCode::kTypeMismatch, "column '" + col.name() + "' is not numeric");
      }
      for (size_t r = 0; r < n; ++r) {
        double v = col.number(r);
        if (std::isnan(v) && mode == EncodingMode::kLinear) v = enc.impute_value;
        out[r * stride + offset] = v;
      }
      break;
    }
    case EncodedColumn::Kind::kOrdinal: {
      for (size_t r = 0; r < n; ++r) {
        double v = kNaN;
        if (!col.is_missing(r)) {
          if (auto rank = lookup_rank(enc, col.cell_string(r))) v = *rank;
        }
        if (std::isnan(v) && mode == EncodingMode::kLinear) v = enc.impute_value;
        out[r * stride + offset] = v;
      }
      break;
    }
    case EncodedColumn::Kind::kOneHot: {
      for (size_t r = 0; r < n; ++r) {
        const bool missing = col.is_missing(r);
        const std::string level = missing ? "" : col.cell_string(r);
        const bool known = !missing && (level == enc.reference_level ||
                                        std::find(enc.levels.begin(), enc.levels.end(),
                                                  level) != enc.levels.end());
        for (size_t j = 0; j < enc.levels.size(); ++j) {
          double v;
          if (!known) {
            v = mode == EncodingMode::kLinear ? 0.0 : kNaN;
          } else {
            v = level == enc.levels[j] ? 1.0 : 0.0;
          }
          out[r * stride + offset + j] = v;
        }
      }
      break;
    }
  }
}

}  // namespace

const char* encoding_mode_name(EncodingMode mode) {
  return mode == EncodingMode::kTree ? "tree" : "linear";
}

const EncodedColumn* EncodingMap::find(std::string_view source) const {
  for (const EncodedColumn& c : columns) {
    if (c.source == source) return &c;
  }
  return nullptr;
}

bool LabeledDataset::has_missing() const {
  return std::any_of(features.begin(), features.end(),
                     [](double v) { return std::isnan(v); });
}

size_t LabeledDataset::count(uint8_t label) const {
  return static_cast<size_t>(std::count(labels.begin(), labels.end(), label));
}

LabeledDataset LabeledDataset::subset(std::span<const size_t> rows) const {
  LabeledDataset out;
  out.n_rows = rows.size();
  out.n_features = n_features;
  out.feature_names = feature_names;
  out.encoding = encoding;
  out.features.reserve(rows.size() * n_features);
  out.labels.reserve(rows.size());
  for (size_t r : rows) {
    auto src = row(r);
    out.features.insert(out.features.end(), src.begin(), src.end());
    out.labels.push_back(labels[r]);
  }
  return out;
}

void LabeledDataset::require_both_classes() const {
  const size_t fails = count(kFail);
  if (fails == 0 || fails == n_rows) {
    throw Error(ErrorCode::kSingleClass,
                "training data has " + std::to_string(fails) + " fail and " +
                    std::to_string(n_rows - fails) + " pass rows");
  }
}

LabeledDataset encode_features(const Table& table, const SchemaSpec& schema,
                               EncodingMode mode) {
  std::vector<uint8_t> labels = outcome_labels(table);

  EncodingMap map;
  map.mode = mode;
  std::vector<const Column*> sources;
  for (const Column& col : table.columns()) {
    const ColumnSpec* spec = schema.find(col.name());
    if (spec == nullptr || spec->role != ColumnRole::kFeature) continue;
    if (col.name() == kOutcomeColumn) continue;
    if (table.n_rows() > 0 && col.missing_count() == table.n_rows()) {
      throw Error(ErrorCode::kAllMissingColumn, "feature '" + col.name() + "'");
    }
    EncodedColumn enc;
    enc.source = col.name();
    if (col.is_numeric()) {
      enc.kind = EncodedColumn::Kind::kNumeric;
      enc.produced = {col.name()};
      if (mode == EncodingMode::kLinear) {
        std::vector<double> present;
        for (double v : col.numbers()) {
          if (!std::isnan(v)) present.push_back(v);
        }
        enc.impute_value = median_of(std::move(present));
      }
    } else if (col.is_categorical() && spec->ordinal) {
      enc.kind = EncodedColumn::Kind::kOrdinal;
      enc.produced = {col.name()};
      enc.ordinal_map = ordinal_ranks(col, *spec);
      if (mode == EncodingMode::kLinear) {
        std::vector<double> present;
        for (size_t r = 0; r < col.size(); ++r) {
          if (!col.is_missing(r)) present.push_back(*lookup_rank(enc, col.cell_string(r)));
        }
        enc.impute_value = median_of(std::move(present));
      }
    } else if (col.is_categorical()) {
      enc.kind = EncodedColumn::Kind::kOneHot;
      std::vector<size_t> counts(col.levels().size(), 0);
      for (int32_t code : col.codes()) {
        if (code >= 0) ++counts[code];
      }
      const size_t ref = static_cast<size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      enc.reference_level = col.levels()[ref];
      for (size_t l = 0; l < col.levels().size(); ++l) {
        if (l == ref || counts[l] == 0) continue;
        enc.levels.push_back(col.levels()[l]);
        enc.produced.push_back(col.name() + ": " + col.levels()[l]);
      }
    } else {
      throw Error(ErrorCode::kSchemaError,
                  "text column '" + col.name() + "' cannot be a feature");
    }
    map.columns.push_back(std::move(enc));
    sources.push_back(&col);
  }

  LabeledDataset out;
  out.n_rows = table.n_rows();
  out.labels = std::move(labels);
  for (const EncodedColumn& enc : map.columns) {
    out.feature_names.insert(out.feature_names.end(), enc.produced.begin(),
                             enc.produced.end());
  }
  out.n_features = out.feature_names.size();
  if (out.n_features == 0) {
    throw Error(ErrorCode::kSchemaError, "no feature columns to encode");
  }
  out.features.assign(out.n_rows * out.n_features, kNaN);
  size_t offset = 0;
  for (size_t i = 0; i < map.columns.size(); ++i) {
    fill_column(*sources[i], map.columns[i], mode, out.features, out.n_features, offset);
    offset += map.columns[i].produced.size();
  }
  out.encoding = std::move(map);
  const size_t fails = out.count(kFail);
  if (fails == 0 || fails == out.n_rows) {
    throw Error(ErrorCode::kSingleClass, "outcome has a single level");
  }
  return out;
}

LabeledDataset apply_encoding(const Table& table, const EncodingMap& encoding) {
  LabeledDataset out;
  out.n_rows = table.n_rows();
  out.labels = table.has_column(kOutcomeColumn)
                   ? outcome_labels(table)
                   : std::vector<uint8_t>(table.n_rows(), kPass);
  for (const EncodedColumn& enc : encoding.columns) {
    out.feature_names.insert(out.feature_names.end(), enc.produced.begin(),
                             enc.produced.end());
  }
  out.n_features = out.feature_names.size();
  out.features.assign(out.n_rows * out.n_features, kNaN);
  size_t offset = 0;
  for (const EncodedColumn& enc : encoding.columns) {
    const Column* col = table.find(enc.source);
    if (col == nullptr) {
      throw Error(ErrorCode::kFeatureMismatch,
                  "table lacks encoded source column '" + enc.source + "'");
    }
    fill_column(*col, enc, encoding.mode, out.features, out.n_features, offset);
    offset += enc.produced.size();
  }
  out.encoding = encoding;
  return out;
}

std::optional<std::string> decode_categorical(const LabeledDataset& dataset, size_t row,
                                              const std::string& source) {
  const EncodedColumn* enc = dataset.encoding.find(source);
  if (enc == nullptr) {
    throw Error(ErrorCode::kFeatureMismatch, "no encoded column '" + source + "'");
  }
  size_t offset = 0;
  for (const EncodedColumn& c : dataset.encoding.columns) {
    if (&c == enc) break;
    offset += c.produced.size();
  }
  switch (enc->kind) {
    case EncodedColumn::Kind::kNumeric:
      throw Error(ErrorCode::kTypeMismatch, "'" + source + "' is numeric");
    case EncodedColumn::Kind::kOrdinal: {
      const double v = dataset.at(row, offset);
      if (std::isnan(v)) return std::nullopt;
      for (const auto& [level, rank] : enc->ordinal_map) {
        if (rank == v) return level;
      }
      return std::nullopt;
    }
    case EncodedColumn::Kind::kOneHot: {
      for (size_t j = 0; j < enc->levels.size(); ++j) {
        const double v = dataset.at(row, offset + j);
        if (std::isnan(v)) return std::nullopt;
        if (v == 1.0) return enc->levels[j];
      }
      return enc->reference_level;
    }
  }
  return std::nullopt;
}

std::vector<size_t> balanced_indices(std::span<const uint8_t> labels, uint64_t seed) {
  std::vector<size_t> fails;
  std::vector<size_t> passes;
  for (size_t r = 0; r < labels.size(); ++r) {
    (labels[r] == kFail ? fails : passes).push_back(r);
  }
  if (fails.empty() || passes.empty()) {
    throw Error(ErrorCode::kSingleClass, "cannot balance a single-class dataset");
  }
  Rng rng(seed);
  std::vector<size_t>& majority = fails.size() > passes.size() ? fails : passes;
  const size_t target = std::min(fails.size(), passes.size());
  rng.shuffle(std::span<size_t>(majority));
  majority.resize(target);
  std::sort(majority.begin(), majority.end());

  std::vector<size_t> out;
  out.reserve(2 * target);
  out.insert(out.end(), fails.begin(), fails.end());
  out.insert(out.end(), passes.begin(), passes.end());
  rng.shuffle(std::span<size_t>(out));
  return out;
}

LabeledDataset balance_classes(const LabeledDataset& dataset, uint64_t seed) {
  const auto rows = balanced_indices(dataset.labels, seed);
  return dataset.subset(rows);
}

}  // namespace eduml
