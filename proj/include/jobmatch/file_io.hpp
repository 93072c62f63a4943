#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace jobmatch {

// Writes to a temporary file in the same directory, then renames it over
// `path`. Throws std::runtime_error naming the path on failure; no partial
// file is left behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Throws std::runtime_error naming the path.
std::string read_file(const std::filesystem::path& path);

}  // namespace jobmatch
