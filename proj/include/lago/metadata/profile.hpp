#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lago::metadata {

// "element" or "element.qualifier"
using FieldKey = std::string;

enum class ValueFormat { Date, Token };

struct NumericRange {
  double min = 0;
  double max = 0;
  std::string unit;
};

// The application profile records are validated against. Loaded from a JSON
// profile file (see docs/formats.md); the shipped default is compiled in from
// config/lago_profile.json.
struct LagoProfile {
  std::string name;
  std::vector<FieldKey> required;
  std::set<FieldKey> optional;
  std::map<FieldKey, ValueFormat> formats;
  std::map<FieldKey, std::set<std::string>> vocabularies;
  std::map<FieldKey, NumericRange> ranges;

  bool knows(const FieldKey& key) const;

  // Throws Error(ConfigError).
  static LagoProfile from_json(std::string_view text);
  static LagoProfile load(const std::filesystem::path& path);
  static const LagoProfile& builtin();
};

}  // namespace lago::metadata
