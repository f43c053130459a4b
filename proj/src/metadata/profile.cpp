#include "lago/metadata/profile.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/metadata/record.hpp"

namespace lago::metadata {

namespace {

#include "builtin_profile.inc"

void check_key(const std::string& key) {
  auto dot = key.find('.');
  const bool ok = dot == std::string::npos
                      ? is_field_name(key)
                      : is_field_name(key.substr(0, dot)) && is_field_name(key.substr(dot + 1));
  if (!ok) throw Error(ErrorCode::ConfigError, "profile: bad field key '" + key + "'", key);
}

}  // namespace

bool LagoProfile::knows(const FieldKey& key) const {
  return optional.count(key) > 0 || std::find(required.begin(), required.end(), key) != required.end() ||
         formats.count(key) > 0 || vocabularies.count(key) > 0 || ranges.count(key) > 0;
}

LagoProfile LagoProfile::from_json(std::string_view text) {
  LagoProfile p;
  try {
    const auto j = nlohmann::json::parse(text);
    p.name = j.value("name", "unnamed");
    for (const auto& k : j.value("required", nlohmann::json::array())) {
      check_key(k.get<std::string>());
      p.required.push_back(k.get<std::string>());
    }
    for (const auto& k : j.value("optional", nlohmann::json::array())) {
      check_key(k.get<std::string>());
      p.optional.insert(k.get<std::string>());
    }
    const auto formats = j.value("formats", nlohmann::json::object());
    for (const auto& [k, v] : formats.items()) {
      check_key(k);
      const auto f = v.get<std::string>();
      if (f == "date")
        p.formats[k] = ValueFormat::Date;
      else if (f == "token")
        p.formats[k] = ValueFormat::Token;
      else
        throw Error(ErrorCode::ConfigError, "profile: unknown format '" + f + "' for " + k, k);
    }
    const auto vocab = j.value("controlledVocabularies", nlohmann::json::object());
    for (const auto& [k, v] : vocab.items()) {
      check_key(k);
      for (const auto& term : v) p.vocabularies[k].insert(term.get<std::string>());
    }
    const auto ranges = j.value("numericRanges", nlohmann::json::object());
    for (const auto& [k, v] : ranges.items()) {
      check_key(k);
      NumericRange r{v.at("min").get<double>(), v.at("max").get<double>(), v.value("unit", "")};
      if (r.min > r.max) throw Error(ErrorCode::ConfigError, "profile: empty range for " + k, k);
      p.ranges[k] = r;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("profile: ") + e.what());
  }
  return p;
}

LagoProfile LagoProfile::load(const std::filesystem::path& path) {
  try {
    return from_json(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw Error(ErrorCode::ConfigError, e.what(), path.string());
    throw;
  }
}

const LagoProfile& LagoProfile::builtin() {
  static const LagoProfile profile = from_json(kBuiltinProfileJson);
  return profile;
}

}  // namespace lago::metadata
