#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lago {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

// `sync` forces the line to stable storage before returning.
void append_line(const std::filesystem::path& path, std::string_view line, bool sync = true);

bool is_empty_or_absent_dir(const std::filesystem::path& path);

}  // namespace lago
