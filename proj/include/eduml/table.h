#ifndef EDUML_TABLE_H_
#define EDUML_TABLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eduml {

enum class ColumnKind { kNumeric, kInteger, kCategorical, kText };

const char* column_kind_name(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view name);

// A named, typed column with per-cell missingness.
//
// Numeric and integer cells are stored as doubles with NaN marking missing.
// Categorical cells are codes into a level list sorted in byte order, with -1
// marking missing. Text cells carry an explicit missing mask.
class Column {
 public:
  static Column numeric(std::string name, std::vector<double> values);
  static Column integer(std::string name, std::vector<double> values);
  static Column categorical(std::string name,
                            const std::vector<std::optional<std::string>>& values);
  // `levels` need not be sorted; they are re-sorted and codes remapped.
  static Column categorical_from_codes(std::string name,
                                       std::vector<std::string> levels,
                                       std::vector<int32_t> codes);
  static Column text(std::string name,
                     const std::vector<std::optional<std::string>>& values);

  const std::string& name() const { return name_; }
  ColumnKind kind() const { return kind_; }
  size_t size() const;

  bool is_numeric() const {
    return kind_ == ColumnKind::kNumeric || kind_ == ColumnKind::kInteger;
  }
  bool is_categorical() const { return kind_ == ColumnKind::kCategorical; }

  bool is_missing(size_t row) const;
  size_t missing_count() const;

  // Numeric access; NaN when missing.
  double number(size_t row) const { return numbers_[row]; }
  const std::vector<double>& numbers() const { return numbers_; }

  // Categorical access; -1 when missing.
  int32_t code(size_t row) const { return codes_[row]; }
  const std::vector<int32_t>& codes() const { return codes_; }
  const std::vector<std::string>& levels() const { return levels_; }
  std::optional<int32_t> level_code(std::string_view level) const;

  // Canonical text of a cell; empty string when missing.
  std::string cell_string(size_t row) const;

  Column take(std::span<const size_t> rows) const;
  Column renamed(std::string name) const;

  // Missing cells compare equal to each other.
  bool operator==(const Column& other) const;

 private:
  Column(std::string name, ColumnKind kind) : name_(std::move(name)), kind_(kind) {}

  std::string name_;
  ColumnKind kind_;
  std::vector<double> numbers_;
  std::vector<int32_t> codes_;
  std::vector<std::string> levels_;
  std::vector<std::string> texts_;
  std::vector<uint8_t> text_missing_;
};

// Ordered collection of equally long, uniquely named columns. Operations on
// tables return new tables; a constructed table is never mutated.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  size_t n_rows() const { return n_rows_; }
  size_t n_columns() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  std::vector<std::string> column_names() const;

  bool has_column(std::string_view name) const;
  const Column* find(std::string_view name) const;
  // Throws MissingColumn.
  const Column& column(std::string_view name) const;
  size_t column_index(std::string_view name) const;

  Table with_column(Column column) const;
  Table replace_column(Column column) const;
  Table without_column(std::string_view name) const;
  Table select(std::span<const std::string> names) const;
  Table take_rows(std::span<const size_t> rows) const;

  bool operator==(const Table& other) const = default;

 private:
  std::vector<Column> columns_;
  size_t n_rows_ = 0;
};

// Shortest text that parses back to the same double.
std::string format_number(double value);

}  // namespace eduml

#endif  // EDUML_TABLE_H_
