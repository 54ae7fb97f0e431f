#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace instascope::detail {

using CsvRow = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain commas, quotes ("") and line
// breaks. Accepts LF or CRLF line endings; blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text);

// Quotes the field only when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace instascope::detail
