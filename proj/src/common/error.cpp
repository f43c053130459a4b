#include "lago/common/error.hpp"

#include <array>
#include <utility>

namespace lago {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 28> kNames{{
    {ErrorCode::MalformedXml, "MalformedXml"},
    {ErrorCode::SchemaError, "SchemaError"},
    {ErrorCode::ValidationRejected, "ValidationRejected"},
    {ErrorCode::UnknownCollection, "UnknownCollection"},
    {ErrorCode::MirrorCollection, "MirrorCollection"},
    {ErrorCode::UnknownItem, "UnknownItem"},
    {ErrorCode::UnknownBitstream, "UnknownBitstream"},
    {ErrorCode::IntegrityError, "IntegrityError"},
    {ErrorCode::InvalidRange, "InvalidRange"},
    {ErrorCode::StorageError, "StorageError"},
    {ErrorCode::IoError, "IoError"},
    {ErrorCode::ProtocolError, "ProtocolError"},
    {ErrorCode::TransportError, "TransportError"},
    {ErrorCode::Unauthorized, "Unauthorized"},
    {ErrorCode::UnsupportedPackaging, "UnsupportedPackaging"},
    {ErrorCode::ChecksumMismatch, "ChecksumMismatch"},
    {ErrorCode::InvalidPackage, "InvalidPackage"},
    {ErrorCode::PackageTooLarge, "PackageTooLarge"},
    {ErrorCode::SuffixTaken, "SuffixTaken"},
    {ErrorCode::EmptyValues, "EmptyValues"},
    {ErrorCode::InvalidValue, "InvalidValue"},
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::InvalidHandle, "InvalidHandle"},
    {ErrorCode::ManifestUnreadable, "ManifestUnreadable"},
    {ErrorCode::ManifestEmpty, "ManifestEmpty"},
    {ErrorCode::OutDirNotEmpty, "OutDirNotEmpty"},
    {ErrorCode::NoPackagesFound, "NoPackagesFound"},
    {ErrorCode::ConfigError, "ConfigError"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
  for (const auto& [c, name] : kNames)
    if (c == code) return name;
  return "Unknown";
}

bool parse_error_code(std::string_view text, ErrorCode& out) {
  for (const auto& [c, name] : kNames) {
    if (name == text) {
      out = c;
      return true;
    }
  }
  return false;
}

Error::Error(ErrorCode code, const std::string& message, std::string subject)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      message_(message),
      subject_(std::move(subject)) {}

}  // namespace lago
