#include "eduml/csv.h"

#include <fstream>
#include <ostream>
#include <sstream>

#include "eduml/error.h"

namespace eduml {

CsvDocument parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content || record.size() > 1 || !record.front().empty()) {
      records.push_back(std::move(record));
    }
    record.clear();
    record_has_content = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error(ErrorCode::kMalformedRow,
                      "unexpected quote on line " + std::to_string(line));
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (field_was_quoted) {
          throw Error(ErrorCode::kMalformedRow,
                      "text after closing quote on line " + std::to_string(line));
        }
        field.push_back(c);
        break;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kMalformedRow, "unterminated quoted field");
  }
  if (!field.empty() || !record.empty() || record_has_content) end_record();

  CsvDocument doc;
  if (records.empty()) throw Error(ErrorCode::kMissingHeader, "empty CSV input");
  doc.header = std::move(records.front());
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != doc.header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "data row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " fields, header has " +
                      std::to_string(doc.header.size()));
    }
    doc.rows.push_back(std::move(records[r]));
  }
  return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(value);
  }
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out.push_back('\n');
  return out;
}

void write_table_csv(const Table& table, std::ostream& out) {
  out << csv_line(table.column_names());
  std::vector<std::string> fields(table.n_columns());
  for (size_t r = 0; r < table.n_rows(); ++r) {
    for (size_t c = 0; c < table.n_columns(); ++c) {
      fields[c] = table.columns()[c].cell_string(r);
    }
    out << csv_line(fields);
  }
}

std::string table_to_csv(const Table& table) {
  std::ostringstream ss;
  write_table_csv(table, ss);
  return ss.str();
}

}  // namespace eduml
