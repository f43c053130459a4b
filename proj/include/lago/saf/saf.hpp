#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lago/metadata/record.hpp"
#include "lago/zip/zip.hpp"

namespace lago::saf {

inline constexpr std::string_view kDublinCoreFile = "dublin_core.xml";
inline constexpr std::string_view kLagoFile = "metadata_lago.xml";
inline constexpr std::string_view kContentsFile = "contents";
inline constexpr std::string_view kBundle = "bundle:ORIGINAL";

struct SafFile {
  std::string name;
  std::string bytes;

  friend bool operator==(const SafFile&, const SafFile&) = default;
};

// One item: the full record plus its data files in `contents` order.
struct SafItem {
  metadata::MetadataRecord record;
  std::vector<SafFile> files;

  friend bool operator==(const SafItem&, const SafItem&) = default;
};

bool is_control_file(std::string_view name);
// A plain relative file name: no separators, not "." or "..", no control chars.
bool is_safe_file_name(std::string_view name);

// DSpace dublin_core.xml: <dcvalue element=".." qualifier="none">
std::string dublin_core_xml(const metadata::MetadataRecord& record);
std::string contents_text(const std::vector<SafFile>& files);

// Writes the three control files and the data files into `dir`.
void write_package(const std::filesystem::path& dir, const SafItem& item);

// Relative paths are taken against the item directory. Throws
// Error(InvalidPackage) whose subject is the first offending path, or
// ValidationRejected when dublin_core.xml disagrees with metadata_lago.xml.
SafItem parse_files(const std::vector<zip::Entry>& files, std::string_view label = {});
// The archive must hold exactly one top-level item directory.
SafItem parse_archive(const std::vector<zip::Entry>& entries);
SafItem read_package(const std::filesystem::path& dir);

// Deterministic zip of an item directory, rooted at the directory's name.
std::string zip_package(const std::filesystem::path& dir);
std::string zip_item(const std::string& dir_name, const SafItem& item);

}  // namespace lago::saf
