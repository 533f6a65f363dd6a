#pragma once

#include <filesystem>
#include <string>

namespace trackadapt {

// Writes to "<path>.tmp" and renames over path. ConfigError if the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// ConfigError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace trackadapt
