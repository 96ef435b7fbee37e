#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace alphaforge::csv {

/// Splits one CSV line on commas. No quoting support; none of the formats
/// used here carry embedded commas.
std::vector<std::string_view> split(std::string_view line);

/// Locale-independent strict double parse. Throws Error(MalformedRow).
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Reads a text file into lines, stripping a trailing '\r' from each.
std::vector<std::string> read_lines(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace alphaforge::csv
