#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ozlasso {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

// Strict full-token parse; leading/trailing blanks are trimmed first.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view s);

// Splits one delimited line. No quoting support: the formats handled here
// never embed the delimiter inside a field.
std::vector<std::string> split_fields(std::string_view line, char delim);

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temporary file and rename, so readers never observe
// a partially written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace ozlasso
