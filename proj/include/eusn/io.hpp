#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace eusn {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

/// Strict full-token parse; rejects trailing garbage. Accepts a leading '+'.
std::optional<double> parse_double(std::string_view token);

/// Write via a sibling temporary file and rename, so readers never observe
/// a partial file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace eusn
