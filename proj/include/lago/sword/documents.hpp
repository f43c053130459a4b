#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lago/common/error.hpp"
#include "lago/common/time.hpp"
#include "lago/metadata/validate.hpp"

namespace lago::sword {

inline constexpr std::string_view kAppNamespace = "http://www.w3.org/2007/app";
inline constexpr std::string_view kAtomNamespace = "http://www.w3.org/2005/Atom";
inline constexpr std::string_view kSwordNamespace = "http://purl.org/net/sword/";
inline constexpr std::string_view kPackaging = "lago-saf-zip";
inline constexpr std::string_view kZipMediaType = "application/zip";

struct ServiceCollection {
  std::string href;
  std::string title;
  std::vector<std::string> accepted_packaging;
  std::vector<std::string> accepted_media_types;

  friend bool operator==(const ServiceCollection&, const ServiceCollection&) = default;
};

struct ServiceDocument {
  std::string version = "1.3";
  // Advertised as sword:maxUploadSize in kilobytes.
  std::uint64_t max_upload_bytes = 0;
  std::string workspace_title;
  std::vector<ServiceCollection> collections;

  friend bool operator==(const ServiceDocument&, const ServiceDocument&) = default;
};

struct DepositReceipt {
  std::string item_uuid;
  std::string oai_identifier;
  std::optional<std::string> pid;
  std::string treatment;
  std::string location;
  Timestamp updated{};

  friend bool operator==(const DepositReceipt&, const DepositReceipt&) = default;
};

std::string render_service_document(const ServiceDocument& doc);
ServiceDocument parse_service_document(std::string_view xml);

std::string render_receipt(const DepositReceipt& receipt);
DepositReceipt parse_receipt(std::string_view xml);

// <sword:error> body carrying the error code, message, subject and, for
// validation failures, the issue list.
std::string render_error(const Error& error);
// Rebuilds the error a server reported (ValidationRejected keeps its report).
// Throws it; never returns.
[[noreturn]] void throw_error_document(std::string_view xml, int status);

int http_status_for(ErrorCode code);

}  // namespace lago::sword
