#ifndef EDUML_CSV_H_
#define EDUML_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "eduml/table.h"

namespace eduml {

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 style: comma separated, optional double-quoted fields with "" as an
// escaped quote, LF or CRLF line ends. A leading UTF-8 BOM is skipped.
// Every record must have as many fields as the header (MalformedRow).
CsvDocument parse_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Quotes a field when it contains a comma, quote, or line break.
std::string csv_field(std::string_view value);
std::string csv_line(const std::vector<std::string>& fields);

// Header row of column names, then one row per table row; missing cells are
// written as empty fields.
void write_table_csv(const Table& table, std::ostream& out);
std::string table_to_csv(const Table& table);

}  // namespace eduml

#endif  // EDUML_CSV_H_
