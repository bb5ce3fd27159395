// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

std::string read_text_file(const std::filesystem::path& path);

/// Creates parent directories as needed; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Minimal RFC 4180 reader: comma separated, double-quote escaping, LF or CRLF.
using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
  // 1-based source line of each row, for error messages.
  std::vector<std::size_t> lines;
};

/// Parses `text` and checks that the header equals `expected_header` exactly.
/// Blank lines are skipped. Throws ParseError naming `source` and the line.
CsvTable parse_csv(std::string_view text, const std::string& source,
                   const std::vector<std::string>& expected_header);

/// Quotes a field only when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// Formats with 6 significant digits; never emits "-0".
std::string format_number(double value);

}  // namespace segeval
