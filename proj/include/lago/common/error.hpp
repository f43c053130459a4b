#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lago {

enum class ErrorCode {
  MalformedXml,
  SchemaError,
  ValidationRejected,
  UnknownCollection,
  MirrorCollection,
  UnknownItem,
  UnknownBitstream,
  IntegrityError,
  InvalidRange,
  StorageError,
  IoError,
  ProtocolError,
  TransportError,
  Unauthorized,
  UnsupportedPackaging,
  ChecksumMismatch,
  InvalidPackage,
  PackageTooLarge,
  SuffixTaken,
  EmptyValues,
  InvalidValue,
  NotFound,
  InvalidHandle,
  ManifestUnreadable,
  ManifestEmpty,
  OutDirNotEmpty,
  NoPackagesFound,
  ConfigError,
};

std::string_view to_string(ErrorCode code);
bool parse_error_code(std::string_view text, ErrorCode& out);

// Every failure raised by the library. `subject` names the offending thing
// (a path inside a package, a byte offset, an identifier) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string subject = {});

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& message() const noexcept { return message_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string subject_;
};

}  // namespace lago
