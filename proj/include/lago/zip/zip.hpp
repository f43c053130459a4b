#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lago::zip {

struct Entry {
  std::string name;  // '/'-separated; directories end with '/'
  std::string data;

  bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

// Stored (uncompressed) archive with fixed timestamps: identical input gives
// identical bytes.
std::string write_archive(const std::vector<Entry>& entries);

// Reads stored and deflated entries and checks each CRC-32. `max_total`
// bounds the sum of uncompressed sizes. Throws Error(InvalidPackage) naming
// the offending entry, or "<archive>" for structural damage.
std::vector<Entry> read_archive(std::string_view bytes, std::size_t max_total = 1ull << 32);

}  // namespace lago::zip
