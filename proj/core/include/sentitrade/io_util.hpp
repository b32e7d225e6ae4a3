#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sentitrade {

/// Malformed or inconsistent input data (bad file contents, broken invariants).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field if it contains a comma, quote, or newline.
std::string csv_escape(std::string_view field);

/// Reads a whole text file as lines, stripping a UTF-8 BOM and trailing '\r'.
/// Throws InputError if the file cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes `content` to `path` (truncating), creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-string parse; no leading/trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, long long& out);

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

}  // namespace sentitrade
