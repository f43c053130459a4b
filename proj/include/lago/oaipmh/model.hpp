#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lago/common/time.hpp"
#include "lago/http/http.hpp"
#include "lago/xml/xml.hpp"

namespace lago::oaipmh {

inline constexpr std::string_view kOaiNamespace = "http://www.openarchives.org/OAI/2.0/";
inline constexpr std::string_view kOaiSchema = "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd";
inline constexpr std::string_view kGranularity = "YYYY-MM-DDThh:mm:ssZ";

enum class Verb { Identify, ListMetadataFormats, ListSets, ListIdentifiers, ListRecords, GetRecord };

std::string_view to_string(Verb v);
std::optional<Verb> parse_verb(std::string_view s);

enum class OaiErrorCode {
  BadVerb,
  BadArgument,
  BadResumptionToken,
  CannotDisseminateFormat,
  IdDoesNotExist,
  NoRecordsMatch,
  NoMetadataFormats,
  NoSetHierarchy,
};

std::string_view to_string(OaiErrorCode c);
std::optional<OaiErrorCode> parse_error_code(std::string_view s);

struct OaiError {
  OaiErrorCode code;
  std::string message;

  friend bool operator==(const OaiError&, const OaiError&) = default;
};

struct Header {
  std::string identifier;
  Timestamp datestamp{};
  std::vector<std::string> set_specs;
  bool deleted = false;

  friend bool operator==(const Header&, const Header&) = default;
};

struct Record {
  Header header;
  // The single metadata payload element; absent for deleted records.
  std::optional<xml::Element> metadata;
  std::vector<xml::Element> about;

  friend bool operator==(const Record&, const Record&) = default;
};

struct ResumptionToken {
  std::string value;  // empty on the final page of a list
  std::optional<std::size_t> complete_list_size;
  std::optional<std::size_t> cursor;
  std::optional<Timestamp> expiration;

  friend bool operator==(const ResumptionToken&, const ResumptionToken&) = default;
};

struct IdentifyInfo {
  std::string repository_name;
  std::string base_url;
  std::string protocol_version = "2.0";
  std::vector<std::string> admin_emails;
  Timestamp earliest_datestamp{};
  std::string deleted_record = "persistent";
  std::string granularity{kGranularity};
  std::vector<xml::Element> descriptions;

  friend bool operator==(const IdentifyInfo&, const IdentifyInfo&) = default;
};

struct MetadataFormat {
  std::string prefix;
  std::string schema;
  std::string namespace_uri;

  friend bool operator==(const MetadataFormat&, const MetadataFormat&) = default;
};

struct SetInfo {
  std::string spec;
  std::string name;

  friend bool operator==(const SetInfo&, const SetInfo&) = default;
};

struct ListMetadataFormatsPayload {
  std::vector<MetadataFormat> formats;
  friend bool operator==(const ListMetadataFormatsPayload&, const ListMetadataFormatsPayload&) = default;
};

struct ListSetsPayload {
  std::vector<SetInfo> sets;
  std::optional<ResumptionToken> token;
  friend bool operator==(const ListSetsPayload&, const ListSetsPayload&) = default;
};

struct ListIdentifiersPayload {
  std::vector<Header> headers;
  std::optional<ResumptionToken> token;
  friend bool operator==(const ListIdentifiersPayload&, const ListIdentifiersPayload&) = default;
};

struct ListRecordsPayload {
  std::vector<Record> records;
  std::optional<ResumptionToken> token;
  friend bool operator==(const ListRecordsPayload&, const ListRecordsPayload&) = default;
};

struct GetRecordPayload {
  Record record;
  friend bool operator==(const GetRecordPayload&, const GetRecordPayload&) = default;
};

// monostate: error response (errors non-empty).
using Payload = std::variant<std::monostate, IdentifyInfo, ListMetadataFormatsPayload, ListSetsPayload,
                             ListIdentifiersPayload, ListRecordsPayload, GetRecordPayload>;

struct Response {
  Timestamp response_date{};
  std::string request_url;
  // Attributes of the echoed request element, in document order.
  http::QueryParams request_arguments;
  std::vector<OaiError> errors;
  Payload payload;
  // Elements this model does not know, kept in order and re-emitted.
  std::vector<xml::Element> unknown;

  bool is_error() const { return !errors.empty(); }
  bool has_error(OaiErrorCode code) const;

  friend bool operator==(const Response&, const Response&) = default;
};

xml::Element render(const Response& response);
std::string render_oai_response(const Response& response);

// Throws Error(ProtocolError) whose subject is the element path at fault.
Response parse_oai_response(const xml::Element& root);
Response parse_oai_response(std::string_view xml);

}  // namespace lago::oaipmh
