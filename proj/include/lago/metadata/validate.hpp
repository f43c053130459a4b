#pragma once

#include <string>
#include <vector>

#include "lago/common/error.hpp"
#include "lago/metadata/profile.hpp"
#include "lago/metadata/record.hpp"

namespace lago::metadata {

enum class Severity { Error, Warning };

struct Issue {
  Severity severity;
  std::string field_path;
  std::string message;

  friend bool operator==(const Issue&, const Issue&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  std::size_t error_count() const;
  void add(Severity severity, std::string field_path, std::string message);

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

std::string_view to_string(Severity s);

// Pure; never throws. Errors: missing required pair, vocabulary violation,
// value out of range or unparseable, bad date/token format, malformed field
// name, empty value, more than one identifier.uri. Unknown pairs are warnings.
ValidationReport validate_record(const MetadataRecord& record, const LagoProfile& profile);

class ValidationRejected : public Error {
 public:
  explicit ValidationRejected(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace lago::metadata
