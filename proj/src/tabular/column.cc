#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "eduml/error.h"
#include "eduml/table.h"

namespace eduml {

const char* column_kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kInteger: return "integer";
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kText: return "text";
  }
  return "?";
}

ColumnKind parse_column_kind(std::string_view name) {
  if (name == "numeric" || name == "float") return ColumnKind::kNumeric;
  if (name == "integer" || name == "int") return ColumnKind::kInteger;
  if (name == "categorical" || name == "category") return ColumnKind::kCategorical;
  if (name == "text" || name == "string") return ColumnKind::kText;
  throw Error(ErrorCode::kSchemaError,
              "unknown column kind '" + std::string(name) + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, end);
}

Column Column::numeric(std::string name, std::vector<double> values) {
  Column c(std::move(name), ColumnKind::kNumeric);
  c.numbers_ = std::move(values);
  return c;
}

Column Column::integer(std::string name, std::vector<double> values) {
  Column c(std::move(name), ColumnKind::kInteger);
  for (double v : values) {
    if (!std::isnan(v) && v != std::floor(v)) {
      throw Error(ErrorCode::kTypeMismatch,
                  "non-integral value in integer column '" + c.name_ + "'");
    }
  }
  c.numbers_ = std::move(values);
  return c;
}

Column Column::categorical(std::string name,
                           const std::vector<std::optional<std::string>>& values) {
  std::vector<std::string> levels;
  for (const auto& v : values) {
    if (v) levels.push_back(*v);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  Column c(std::move(name), ColumnKind::kCategorical);
  c.codes_.reserve(values.size());
  for (const auto& v : values) {
    if (!v) {
      c.codes_.push_back(-1);
    } else {
      auto it = std::lower_bound(levels.begin(), levels.end(), *v);
      c.codes_.push_back(static_cast<int32_t>(it - levels.begin()));
    }
  }
  c.levels_ = std::move(levels);
  return c;
}

Column Column::categorical_from_codes(std::string name,
                                      std::vector<std::string> levels,
                                      std::vector<int32_t> codes) {
  std::vector<size_t> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return levels[a] < levels[b]; });
  std::vector<int32_t> remap(levels.size());
  std::vector<std::string> sorted;
  sorted.reserve(levels.size());
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && levels[order[i]] == sorted.back()) {
      throw Error(ErrorCode::kSchemaError, "duplicate level '" + sorted.back() +
                                               "' in column '" + name + "'");
    }
    remap[order[i]] = static_cast<int32_t>(i);
    sorted.push_back(levels[order[i]]);
  }
  Column c(std::move(name), ColumnKind::kCategorical);
  c.codes_.reserve(codes.size());
  for (int32_t code : codes) {
    if (code < 0) {
      c.codes_.push_back(-1);
    } else if (static_cast<size_t>(code) >= remap.size()) {
      throw Error(ErrorCode::kSchemaError,
                  "level code out of range in column '" + c.name_ + "'");
    } else {
      c.codes_.push_back(remap[code]);
    }
  }
  c.levels_ = std::move(sorted);
  return c;
}

Column Column::text(std::string name,
                    const std::vector<std::optional<std::string>>& values) {
  Column c(std::move(name), ColumnKind::kText);
  c.texts_.reserve(values.size());
  c.text_missing_.reserve(values.size());
  for (const auto& v : values) {
    c.texts_.push_back(v.value_or(""));
    c.text_missing_.push_back(v ? 0 : 1);
  }
  return c;
}

size_t Column::size() const {
  switch (kind_) {
    case ColumnKind::kNumeric:
    case ColumnKind::kInteger:
      return numbers_.size();
    case ColumnKind::kCategorical:
      return codes_.size();
    case ColumnKind::kText:
      return texts_.size();
  }
  return 0;
}

bool Column::is_missing(size_t row) const {
  switch (kind_) {
    case ColumnKind::kNumeric:
    case ColumnKind::kInteger:
      return std::isnan(numbers_[row]);
    case ColumnKind::kCategorical:
      return codes_[row] < 0;
    case ColumnKind::kText:
      return text_missing_[row] != 0;
  }
  return true;
}

size_t Column::missing_count() const {
  size_t n = 0;
  for (size_t r = 0; r < size(); ++r) n += is_missing(r) ? 1 : 0;
  return n;
}

std::optional<int32_t> Column::level_code(std::string_view level) const {
  auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
  if (it == levels_.end() || *it != level) return std::nullopt;
  return static_cast<int32_t>(it - levels_.begin());
}

std::string Column::cell_string(size_t row) const {
  if (is_missing(row)) return "";
  switch (kind_) {
    case ColumnKind::kNumeric:
    case ColumnKind::kInteger:
      return format_number(numbers_[row]);
    case ColumnKind::kCategorical:
      return levels_[codes_[row]];
    case ColumnKind::kText:
      return texts_[row];
  }
  return "";
}

Column Column::take(std::span<const size_t> rows) const {
  Column c(name_, kind_);
  c.levels_ = levels_;
  switch (kind_) {
    case ColumnKind::kNumeric:
    case ColumnKind::kInteger:
      c.numbers_.reserve(rows.size());
      for (size_t r : rows) c.numbers_.push_back(numbers_[r]);
      break;
    case ColumnKind::kCategorical:
      c.codes_.reserve(rows.size());
      for (size_t r : rows) c.codes_.push_back(codes_[r]);
      break;
    case ColumnKind::kText:
      c.texts_.reserve(rows.size());
      c.text_missing_.reserve(rows.size());
      for (size_t r : rows) {
        c.texts_.push_back(texts_[r]);
        c.text_missing_.push_back(text_missing_[r]);
      }
      break;
  }
  return c;
}

Column Column::renamed(std::string name) const {
  Column c = *this;
  c.name_ = std::move(name);
  return c;
}

bool Column::operator==(const Column& other) const {
  if (name_ != other.name_ || kind_ != other.kind_ || size() != other.size()) {
    return false;
  }
  if (is_numeric()) {
    for (size_t i = 0; i < numbers_.size(); ++i) {
      const double a = numbers_[i];
      const double b = other.numbers_[i];
      if (std::isnan(a) != std::isnan(b)) return false;
      if (!std::isnan(a) && a != b) return false;
    }
    return true;
  }
  if (is_categorical()) {
    return levels_ == other.levels_ && codes_ == other.codes_;
  }
  return texts_ == other.texts_ && text_missing_ == other.text_missing_;
}

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string> names;
  for (const Column& c : columns_) {
    if (!names.insert(c.name()).second) {
      throw Error(ErrorCode::kDuplicateColumn, "column '" + c.name() + "'");
    }
  }
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (const Column& c : columns_) {
    if (c.size() != n_rows_) {
      throw Error(ErrorCode::kSchemaError,
                  "column '" + c.name() + "' has " + std::to_string(c.size()) +
                      " cells, expected " + std::to_string(n_rows_));
    }
  }
}

std::vector<std::string> Table::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const Column& c : columns_) out.push_back(c.name());
  return out;
}

bool Table::has_column(std::string_view name) const { return find(name) != nullptr; }

const Column* Table::find(std::string_view name) const {
  for (const Column& c : columns_) {
    if (c.name() == name) return &c;
  }
  return nullptr;
}

const Column& Table::column(std::string_view name) const {
  const Column* c = find(name);
  if (c == nullptr) {
    throw Error(ErrorCode::kMissingColumn, "no column '" + std::string(name) + "'");
  }
  return *c;
}

size_t Table::column_index(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name() == name) return i;
  }
  throw Error(ErrorCode::kMissingColumn, "no column '" + std::string(name) + "'");
}

Table Table::with_column(Column column) const {
  std::vector<Column> cols = columns_;
  cols.push_back(std::move(column));
  return Table(std::move(cols));
}

Table Table::replace_column(Column column) const {
  std::vector<Column> cols = columns_;
  const size_t i = column_index(column.name());
  cols[i] = std::move(column);
  return Table(std::move(cols));
}

Table Table::without_column(std::string_view name) const {
  std::vector<Column> cols;
  for (const Column& c : columns_) {
    if (c.name() != name) cols.push_back(c);
  }
  return Table(std::move(cols));
}

Table Table::select(std::span<const std::string> names) const {
  std::vector<Column> cols;
  cols.reserve(names.size());
  for (const std::string& n : names) cols.push_back(column(n));
  return Table(std::move(cols));
}

Table Table::take_rows(std::span<const size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const Column& c : columns_) cols.push_back(c.take(rows));
  Table t(std::move(cols));
  t.n_rows_ = rows.size();
  return t;
}

}  // namespace eduml
