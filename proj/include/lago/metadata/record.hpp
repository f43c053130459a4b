#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lago::metadata {

// `[a-z][a-z0-9]*`, the grammar for both element and qualifier.
bool is_field_name(std::string_view s);

struct MetadataField {
  std::string element;
  std::optional<std::string> qualifier;
  std::string value;
  std::optional<std::string> language;

  // "element" or "element.qualifier"
  std::string key() const;

  friend bool operator==(const MetadataField&, const MetadataField&) = default;
};

// Builds a field from "element" or "element.qualifier". Grammar is not
// enforced here; validate_record and the parsers report violations.
MetadataField make_field(std::string_view key, std::string value, std::optional<std::string> language = {});

struct MetadataRecord {
  std::vector<MetadataField> fields;

  MetadataRecord& add(std::string_view key, std::string value);
  std::vector<std::string> values(std::string_view key) const;
  std::optional<std::string> first(std::string_view key) const;
  // Removes all fields with this key; returns how many were removed.
  std::size_t remove(std::string_view key);

  friend bool operator==(const MetadataRecord&, const MetadataRecord&) = default;
};

// Trims every value and sorts fields by (element, qualifier, value, language).
MetadataRecord canonicalize(MetadataRecord record);

inline constexpr std::string_view kPidFieldKey = "identifier.uri";

}  // namespace lago::metadata
