#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lago/metadata/profile.hpp"
#include "lago/metadata/record.hpp"

namespace lago::ingest {

// Fixed leading columns of a manifest; any further cells are extra fields
// written as "element.qualifier=value".
inline constexpr std::string_view kManifestColumns[] = {"sourcePath", "title", "dateIssued", "type",
                                                        "site",       "detector", "rcut",   "altitude"};

struct ItemDescriptor {
  // 1-based CSV record number; the header is row 1.
  std::size_t row = 0;
  metadata::MetadataRecord record;
  // Data files in package order.
  std::vector<std::filesystem::path> files;
};

struct RowError {
  std::size_t row = 0;
  std::string message;

  friend bool operator==(const RowError&, const RowError&) = default;
};

struct ManifestScan {
  std::vector<ItemDescriptor> descriptors;
  std::vector<RowError> errors;
};

// RFC 4180 CSV: quoted fields, doubled quotes, CRLF or LF, optional UTF-8 BOM.
// Throws Error(ManifestUnreadable) on bad quoting or invalid UTF-8.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// sourcePath is a file or a directory of files, relative to the manifest's
// directory. Rows that fail are excluded and reported. Throws
// ManifestUnreadable or ManifestEmpty.
ManifestScan scan_manifest(const std::filesystem::path& csv_path, const metadata::LagoProfile& profile);

}  // namespace lago::ingest
