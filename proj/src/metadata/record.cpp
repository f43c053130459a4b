#include "lago/metadata/record.hpp"

#include <algorithm>
#include <tuple>

#include "lago/common/strings.hpp"

namespace lago::metadata {

bool is_field_name(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
}

std::string MetadataField::key() const { return qualifier ? element + "." + *qualifier : element; }

MetadataField make_field(std::string_view key, std::string value, std::optional<std::string> language) {
  MetadataField f;
  auto dot = key.find('.');
  if (dot == std::string_view::npos) {
    f.element = std::string(key);
  } else {
    f.element = std::string(key.substr(0, dot));
    f.qualifier = std::string(key.substr(dot + 1));
  }
  f.value = std::move(value);
  f.language = std::move(language);
  return f;
}

MetadataRecord& MetadataRecord::add(std::string_view key, std::string value) {
  fields.push_back(make_field(key, std::move(value)));
  return *this;
}

std::vector<std::string> MetadataRecord::values(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& f : fields)
    if (f.key() == key) out.push_back(f.value);
  return out;
}

std::optional<std::string> MetadataRecord::first(std::string_view key) const {
  for (const auto& f : fields)
    if (f.key() == key) return f.value;
  return std::nullopt;
}

std::size_t MetadataRecord::remove(std::string_view key) {
  const auto before = fields.size();
  std::erase_if(fields, [&](const MetadataField& f) { return f.key() == key; });
  return before - fields.size();
}

MetadataRecord canonicalize(MetadataRecord record) {
  for (auto& f : record.fields) f.value = std::string(trim(f.value));
  std::stable_sort(record.fields.begin(), record.fields.end(), [](const MetadataField& a, const MetadataField& b) {
    return std::tie(a.element, a.qualifier, a.value, a.language) < std::tie(b.element, b.qualifier, b.value, b.language);
  });
  return record;
}

}  // namespace lago::metadata
