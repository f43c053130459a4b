#include "lago/ingest/build.hpp"

#include <cstdio>

#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/saf/saf.hpp"

namespace lago::ingest {

namespace fs = std::filesystem;

std::string package_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "item_%04zu", index);
  return buf;
}

void prepare_out_dir(const fs::path& dir) {
  if (!is_empty_or_absent_dir(dir))
    throw Error(ErrorCode::OutDirNotEmpty, dir.string() + " exists and is not empty", dir.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message(), dir.string());
}

std::vector<fs::path> build_saf(const std::vector<ItemDescriptor>& descriptors, const fs::path& out_dir) {
  prepare_out_dir(out_dir);
  std::vector<fs::path> out;
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    const auto& d = descriptors[i];
    saf::SafItem item;
    item.record = metadata::canonicalize(d.record);
    for (const auto& f : d.files) item.files.push_back(saf::SafFile{f.filename().string(), read_file(f)});
    const auto dir = out_dir / package_name(i);
    saf::write_package(dir, item);
    out.push_back(dir);
  }
  return out;
}

}  // namespace lago::ingest
