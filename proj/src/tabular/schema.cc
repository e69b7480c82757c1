#include "eduml/schema.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "eduml/csv.h"
#include "eduml/error.h"

namespace eduml {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> parse_list(std::string_view value, size_t line) {
  std::vector<std::string> out;
  std::string item;
  bool quoted = false;
  bool in_quotes = false;
  auto flush = [&] {
    out.push_back(quoted ? item : std::string(trim(item)));
    item.clear();
    quoted = false;
  };
  for (char c : value) {
    if (in_quotes) {
      if (c == '"') {
        in_quotes = false;
      } else {
        item.push_back(c);
      }
    } else if (c == '"') {
      if (!trim(item).empty()) {
        throw Error(ErrorCode::kSchemaError,
                    "stray quote on schema line " + std::to_string(line));
      }
      item.clear();
      in_quotes = true;
      quoted = true;
    } else if (c == ',') {
      flush();
    } else if (!quoted) {
      item.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kSchemaError,
                "unterminated quote on schema line " + std::to_string(line));
  }
  if (!trim(value).empty()) flush();
  return out;
}

double parse_double(std::string_view value, size_t line) {
  value = trim(value);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kSchemaError, "expected a number on schema line " +
                                             std::to_string(line));
  }
  return out;
}

bool parse_bool(std::string_view value, size_t line) {
  value = trim(value);
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw Error(ErrorCode::kSchemaError,
              "expected true/false on schema line " + std::to_string(line));
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    const bool needs_quotes =
        items[i].empty() || items[i].find_first_of(",\"") != std::string::npos ||
        trim(items[i]) != items[i];
    out += needs_quotes ? "\"" + items[i] + "\"" : items[i];
  }
  return out;
}

}  // namespace

const char* column_role_name(ColumnRole role) {
  switch (role) {
    case ColumnRole::kKey: return "key";
    case ColumnRole::kFeature: return "feature";
    case ColumnRole::kScore: return "score";
    case ColumnRole::kGroup: return "group";
    case ColumnRole::kIgnore: return "ignore";
  }
  return "?";
}

ColumnRole parse_column_role(std::string_view name) {
  if (name == "key") return ColumnRole::kKey;
  if (name == "feature") return ColumnRole::kFeature;
  if (name == "score") return ColumnRole::kScore;
  if (name == "group") return ColumnRole::kGroup;
  if (name == "ignore") return ColumnRole::kIgnore;
  throw Error(ErrorCode::kSchemaError, "unknown role '" + std::string(name) + "'");
}

SchemaSpec::SchemaSpec(std::vector<ColumnSpec> columns) {
  for (ColumnSpec& c : columns) add(std::move(c));
}

const ColumnSpec* SchemaSpec::find(std::string_view name) const {
  for (const ColumnSpec& c : columns_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const ColumnSpec& SchemaSpec::at(std::string_view name) const {
  const ColumnSpec* c = find(name);
  if (c == nullptr) {
    throw Error(ErrorCode::kSchemaError,
                "column '" + std::string(name) + "' is not declared in the schema");
  }
  return *c;
}

void SchemaSpec::add(ColumnSpec spec) {
  if (find(spec.name) != nullptr) {
    throw Error(ErrorCode::kSchemaError,
                "column '" + spec.name + "' declared twice");
  }
  if (spec.ordinal && spec.kind != ColumnKind::kCategorical) {
    throw Error(ErrorCode::kSchemaError,
                "ordinal flag requires a categorical column: '" + spec.name + "'");
  }
  columns_.push_back(std::move(spec));
}

void SchemaSpec::upsert(ColumnSpec spec) {
  for (ColumnSpec& c : columns_) {
    if (c.name == spec.name) {
      c = std::move(spec);
      return;
    }
  }
  add(std::move(spec));
}

std::vector<std::string> SchemaSpec::names_with_role(ColumnRole role) const {
  std::vector<std::string> out;
  for (const ColumnSpec& c : columns_) {
    if (c.role == role) out.push_back(c.name);
  }
  return out;
}

void SchemaSpec::validate(bool require_score) const {
  const auto keys = names_with_role(ColumnRole::kKey);
  if (keys.size() > 1) {
    throw Error(ErrorCode::kSchemaError, "more than one key column");
  }
  const auto scores = names_with_role(ColumnRole::kScore);
  if (require_score && scores.size() != 1) {
    throw Error(ErrorCode::kSchemaError,
                "exactly one score column required, found " +
                    std::to_string(scores.size()));
  }
  for (const ColumnSpec& c : columns_) {
    if (c.role == ColumnRole::kScore && !(c.kind == ColumnKind::kNumeric ||
                                          c.kind == ColumnKind::kInteger)) {
      throw Error(ErrorCode::kSchemaError, "score column '" + c.name +
                                               "' must be numeric");
    }
  }
}

SchemaSpec SchemaSpec::merged_with(const SchemaSpec& other) const {
  SchemaSpec out = *this;
  for (const ColumnSpec& c : other.columns_) out.upsert(c);
  return out;
}

SchemaSpec parse_schema(std::string_view text) {
  std::vector<ColumnSpec> columns;
  ColumnSpec* current = nullptr;
  size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::kSchemaError,
                    "malformed section header on line " + std::to_string(line_no));
      }
      ColumnSpec spec;
      spec.name = std::string(trim(line.substr(1, line.size() - 2)));
      if (spec.name.empty()) {
        throw Error(ErrorCode::kSchemaError,
                    "empty column name on line " + std::to_string(line_no));
      }
      columns.push_back(std::move(spec));
      current = &columns.back();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos || current == nullptr) {
      throw Error(ErrorCode::kSchemaError,
                  "expected 'key = value' inside a section on line " +
                      std::to_string(line_no));
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "kind") {
      current->kind = parse_column_kind(value);
    } else if (key == "role") {
      current->role = parse_column_role(value);
    } else if (key == "ordinal") {
      current->ordinal = parse_bool(value, line_no);
    } else if (key == "missing") {
      current->missing_tokens = parse_list(value, line_no);
    } else if (key == "levels") {
      current->levels = parse_list(value, line_no);
    } else if (key == "synth.levels") {
      current->synth.levels = parse_list(value, line_no);
    } else if (key == "synth.weights") {
      current->synth.weights.clear();
      for (const std::string& w : parse_list(value, line_no)) {
        current->synth.weights.push_back(parse_double(w, line_no));
      }
    } else if (key == "synth.min") {
      current->synth.min = parse_double(value, line_no);
    } else if (key == "synth.max") {
      current->synth.max = parse_double(value, line_no);
    } else if (key == "synth.mean") {
      current->synth.mean = parse_double(value, line_no);
    } else if (key == "synth.sd") {
      current->synth.sd = parse_double(value, line_no);
    } else if (key == "synth.missing") {
      current->synth.missing_fraction = parse_double(value, line_no);
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown schema key '" +
                                               std::string(key) + "' on line " +
                                               std::to_string(line_no));
    }
  }
  return SchemaSpec(std::move(columns));
}

SchemaSpec read_schema(const std::filesystem::path& path) {
  try {
    return parse_schema(read_text_file(path));
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::string format_schema(const SchemaSpec& schema) {
  std::ostringstream out;
  bool first = true;
  for (const ColumnSpec& c : schema.columns()) {
    if (!first) out << "\n";
    first = false;
    out << "[" << c.name << "]\n";
    out << "kind = " << column_kind_name(c.kind) << "\n";
    out << "role = " << column_role_name(c.role) << "\n";
    if (c.ordinal) out << "ordinal = true\n";
    out << "missing = " << join_list(c.missing_tokens) << "\n";
    if (!c.levels.empty()) out << "levels = " << join_list(c.levels) << "\n";
  }
  return out.str();
}

}  // namespace eduml
