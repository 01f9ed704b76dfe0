#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infodemic::io {

// One CSV record, RFC 4180 quoting. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);

// Quotes the field only when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

// Shortest round-trip decimal form; "nan" for NaN.
std::string format_double(double value);

// Flat `key = value` text, `#` comments, blank lines ignored.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

std::string_view trim(std::string_view s);

// All-numeric CSV with a header row; "nan" / empty cells read as NaN.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  // Throws InvalidArgument naming the absent column.
  const std::vector<double>& column(std::string_view name) const;
};

NumericTable read_numeric_csv(std::istream& in);

}  // namespace infodemic::io
