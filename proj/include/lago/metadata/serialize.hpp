#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lago/metadata/record.hpp"
#include "lago/xml/xml.hpp"

namespace lago::metadata {

inline constexpr std::string_view kLagoNamespace = "urn:lago-repo:metadata:v1";
inline constexpr std::string_view kOaiDcNamespace = "http://www.openarchives.org/OAI/2.0/oai_dc/";
inline constexpr std::string_view kOaiDcSchema = "http://www.openarchives.org/OAI/2.0/oai_dc.xsd";
inline constexpr std::string_view kDcNamespace = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view kXsiNamespace = "http://www.w3.org/2001/XMLSchema-instance";

// One of the fifteen unqualified Dublin Core elements.
bool is_dc_element(std::string_view element);

struct DcValue {
  std::string element;  // one of the fifteen DC elements
  std::string value;
  std::optional<std::string> language;

  friend bool operator==(const DcValue&, const DcValue&) = default;
  friend auto operator<=>(const DcValue&, const DcValue&) = default;
};

// Qualified fields flatten to their base DC element; fields whose element is
// not a DC element become dc:description "<element>.<qualifier>=<value>".
std::vector<DcValue> flatten_to_dc(const MetadataRecord& record);

xml::Element to_oai_dc(const MetadataRecord& record);
std::string to_oai_dc_xml(const MetadataRecord& record);

// Where an item came from. Locally created items carry only the node name.
struct OriginTag {
  std::string node_name;
  std::optional<std::string> original_identifier;
  // OAI identifier of the copy this node harvested it from, when that copy
  // was itself a mirror.
  std::optional<std::string> via_identifier;

  friend bool operator==(const OriginTag&, const OriginTag&) = default;
};

struct BitstreamRef {
  std::string name;
  std::uint64_t size_bytes = 0;
  std::string md5;
  std::string media_type;

  friend bool operator==(const BitstreamRef&, const BitstreamRef&) = default;
};

// The lago metadata format. A bare record serializes to fields only; the OAI
// payload additionally carries provenance and the bitstream list.
struct LagoDocument {
  MetadataRecord record;
  std::optional<OriginTag> provenance;
  std::vector<BitstreamRef> bitstreams;

  friend bool operator==(const LagoDocument&, const LagoDocument&) = default;
};

xml::Element to_lago(const LagoDocument& doc);
std::string to_lago_xml(const MetadataRecord& record);
std::string to_lago_xml(const LagoDocument& doc);

// Throws Error(SchemaError) with the byte offset of the offending element.
LagoDocument parse_lago_document(const xml::Element& root);
LagoDocument parse_lago_document(std::string_view xml);
// Returns the canonicalized record.
MetadataRecord parse_lago_xml(std::string_view xml);

}  // namespace lago::metadata
