#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace segmenter {

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// Strict numeric parse: the whole (trimmed) token must be a finite double.
bool parse_double(std::string_view s, double& out);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target, so readers
// never observe a half-written file and reruns replace outputs atomically.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace segmenter
