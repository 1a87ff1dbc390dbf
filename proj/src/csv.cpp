#include "lingbase/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lingbase/core.hpp"

namespace lingbase::csv {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

std::vector<Row> read_table(const std::string& path, char delimiter) {
  const std::string text = read_file(path);
  std::vector<Row> rows;
  Row row;
  row.line = 1;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (row_has_content || row.fields.size() > 0 || !field.empty()) {
      end_field();
      rows.push_back(std::move(row));
    }
    row = Row{};
    row.line = line;
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
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
        in_quotes = true;
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        if (row_has_content || !row.fields.empty() || !field.empty()) {
          row_has_content = true;
        }
        if (row_has_content) {
          end_row();
        } else {
          row.line = line;  // skip blank line
        }
        break;
      default:
        if (c == delimiter) {
          end_field();
          row_has_content = true;
        } else {
          field.push_back(c);
          row_has_content = true;
        }
        break;
    }
  }
  if (in_quotes) {
    throw InputError(path + ": unterminated quoted field at line " +
                     std::to_string(row.line));
  }
  if (row_has_content || !row.fields.empty() || !field.empty()) {
    end_field();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_line(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delimiter) {
      out.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string escape_field(std::string_view field, char delimiter) {
  const bool needs_quotes =
      field.find(delimiter) != std::string_view::npos ||
      field.find('"') != std::string_view::npos ||
      field.find('\n') != std::string_view::npos ||
      field.find('\r') != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

}  // namespace lingbase::csv
