#include "lago/store/media_type.hpp"

#include <array>
#include <utility>

#include "lago/common/strings.hpp"

namespace lago::store {

std::string media_type_for(std::string_view filename) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kTypes{{
      {"txt", "text/plain"},
      {"csv", "text/csv"},
      {"dat", "application/octet-stream"},
      {"json", "application/json"},
      {"xml", "application/xml"},
      {"pdf", "application/pdf"},
      {"png", "image/png"},
      {"jpg", "image/jpeg"},
      {"gz", "application/gzip"},
      {"bz2", "application/x-bzip2"},
      {"zip", "application/zip"},
      {"tar", "application/x-tar"},
      {"h5", "application/x-hdf5"},
      {"root", "application/x-root"},
  }};
  const auto dot = filename.rfind('.');
  if (dot == std::string_view::npos) return "application/octet-stream";
  const auto ext = to_lower(filename.substr(dot + 1));
  for (const auto& [e, type] : kTypes)
    if (e == ext) return std::string(type);
  return "application/octet-stream";
}

}  // namespace lago::store
