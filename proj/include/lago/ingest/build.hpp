#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lago/ingest/manifest.hpp"

namespace lago::ingest {

// "item_0000", "item_0001", ...
std::string package_name(std::size_t index);

// One SAF package per descriptor. Output depends only on the input: reruns
// produce byte-identical trees. Throws OutDirNotEmpty or IoError.
std::vector<std::filesystem::path> build_saf(const std::vector<ItemDescriptor>& descriptors,
                                             const std::filesystem::path& out_dir);

// Creates `dir` if absent; throws OutDirNotEmpty if it holds anything.
void prepare_out_dir(const std::filesystem::path& dir);

}  // namespace lago::ingest
