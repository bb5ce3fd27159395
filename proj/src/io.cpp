// SPDX-License-Identifier: Apache-2.0

#include "segeval/io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "segeval/error.hpp"

namespace segeval {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("{}: cannot open for reading", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(fmt::format("{}: {}", path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("{}: cannot open for writing", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("{}: write failed", path.string()));
}

CsvTable parse_csv(std::string_view text, const std::string& source,
                   const std::vector<std::string>& expected_header) {
  std::vector<CsvRow> records;
  std::vector<std::size_t> record_lines;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_row = [&] {
    if (field_started || !row.empty()) {
      row.push_back(std::move(field));
      records.push_back(std::move(row));
      record_lines.push_back(row_line);
    }
    row.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw ParseError(fmt::format("{}:{}: stray quote inside unquoted field", source, line));
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw ParseError(fmt::format("{}:{}: unterminated quoted field", source, line));
  end_row();

  if (records.empty()) throw ParseError(fmt::format("{}: empty file, expected a header", source));
  CsvTable table;
  table.header = std::move(records.front());
  if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    table.header[0].erase(0, 3);
  }
  if (table.header != expected_header) {
    throw ParseError(fmt::format("{}:{}: expected header \"{}\", got \"{}\"", source,
                                 record_lines.front(), fmt::join(expected_header, ","),
                                 fmt::join(table.header, ",")));
  }
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  table.lines.assign(record_lines.begin() + 1, record_lines.end());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != expected_header.size()) {
      throw ParseError(fmt::format("{}:{}: expected {} fields, got {}", source, table.lines[r],
                                   expected_header.size(), table.rows[r].size()));
    }
  }
  return table;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // folds -0
  auto text = fmt::format("{:.6g}", value);
  if (text == "-0") return "0";
  return text;
}

}  // namespace segeval
