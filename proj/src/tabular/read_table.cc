#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "eduml/csv.h"
#include "eduml/error.h"
#include "eduml/transforms.h"

namespace eduml {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing_token(std::string_view cell, const ColumnSpec& spec) {
  return std::find(spec.missing_tokens.begin(), spec.missing_tokens.end(), cell) !=
         spec.missing_tokens.end();
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || std::isnan(value) ||
      std::isinf(value)) {
    return std::nullopt;
  }
  return value;
}

[[noreturn]] void malformed(size_t row, const std::string& column,
                            std::string_view cell, const char* expected) {
  throw Error(ErrorCode::kMalformedCell,
              "row " + std::to_string(row + 1) + " (line " + std::to_string(row + 2) +
                  "), column '" + column + "': '" + std::string(cell) +
                  "' is not " + expected);
}

}  // namespace

Table parse_table(std::string_view csv_text, const SchemaSpec& schema) {
  const CsvDocument doc = parse_csv(csv_text);

  for (size_t c = 0; c < doc.header.size(); ++c) {
    const std::string name(trim(doc.header[c]));
    if (name.empty()) {
      throw Error(ErrorCode::kMissingHeader,
                  "empty name for header field " + std::to_string(c + 1));
    }
    if (schema.find(name) == nullptr) {
      throw Error(ErrorCode::kUnknownColumnInSchema,
                  "file column '" + name + "' is not declared in the schema");
    }
    for (size_t d = 0; d < c; ++d) {
      if (trim(doc.header[d]) == name) {
        throw Error(ErrorCode::kDuplicateColumn, "header repeats '" + name + "'");
      }
    }
  }

  for (const ColumnSpec& spec : schema.columns()) {
    if (spec.role == ColumnRole::kIgnore) continue;
    const bool present = std::any_of(doc.header.begin(), doc.header.end(),
                                     [&](const std::string& h) { return trim(h) == spec.name; });
    if (!present) {
      throw Error(ErrorCode::kMissingColumn,
                  "schema column '" + spec.name + "' not found in file header");
    }
  }

  // Columns keep the file's order.
  std::vector<Column> columns;
  for (size_t index = 0; index < doc.header.size(); ++index) {
    const ColumnSpec& spec = schema.at(trim(doc.header[index]));
    if (spec.role == ColumnRole::kIgnore) continue;

    const size_t n = doc.rows.size();
    switch (spec.kind) {
      case ColumnKind::kNumeric:
      case ColumnKind::kInteger: {
        std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
        for (size_t r = 0; r < n; ++r) {
          const std::string_view cell = trim(doc.rows[r][index]);
          if (is_missing_token(cell, spec)) continue;
          const auto v = parse_number(cell);
          if (!v) malformed(r, spec.name, cell, "a number");
          if (spec.kind == ColumnKind::kInteger && *v != std::floor(*v)) {
            malformed(r, spec.name, cell, "an integer");
          }
          values[r] = *v;
        }
        columns.push_back(spec.kind == ColumnKind::kInteger
                              ? Column::integer(spec.name, std::move(values))
                              : Column::numeric(spec.name, std::move(values)));
        break;
      }
      case ColumnKind::kCategorical:
      case ColumnKind::kText: {
        std::vector<std::optional<std::string>> values(n);
        for (size_t r = 0; r < n; ++r) {
          const std::string_view cell = trim(doc.rows[r][index]);
          if (!is_missing_token(cell, spec)) values[r] = std::string(cell);
        }
        columns.push_back(spec.kind == ColumnKind::kText
                              ? Column::text(spec.name, values)
                              : Column::categorical(spec.name, values));
        break;
      }
    }
  }
  if (columns.empty()) return Table();
  return Table(std::move(columns));
}

Table read_table(const std::filesystem::path& path, const SchemaSpec& schema) {
  try {
    return parse_table(read_text_file(path), schema);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace eduml
