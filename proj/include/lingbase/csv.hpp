#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lingbase::csv {

struct Row {
  std::size_t line = 0;  // 1-based line of the row start, for error messages
  std::vector<std::string> fields;
};

/// Reads a delimited file. Supports double-quoted fields with "" escapes
/// and embedded delimiters/newlines; tolerates CRLF. Blank lines are
/// skipped.
std::vector<Row> read_table(const std::string& path, char delimiter);

/// Splits one line without quote handling (used for simple writers' tests).
std::vector<std::string> split_line(std::string_view line, char delimiter);

/// Quotes a field if it contains the delimiter, a quote, or a newline.
std::string escape_field(std::string_view field, char delimiter);

/// Shortest decimal form that round-trips exactly through parse_double.
std::string format_double(double v);

/// Strict parse of a full string as a double; nullopt on any trailing junk.
std::optional<double> parse_double(std::string_view s);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace lingbase::csv
