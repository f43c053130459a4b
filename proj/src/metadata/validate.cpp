#include "lago/metadata/validate.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "lago/common/strings.hpp"
#include "lago/common/time.hpp"

namespace lago::metadata {

std::size_t ValidationReport::error_count() const {
  std::size_t n = 0;
  for (const auto& i : issues)
    if (i.severity == Severity::Error) ++n;
  return n;
}

void ValidationReport::add(Severity severity, std::string field_path, std::string message) {
  issues.push_back(Issue{severity, std::move(field_path), std::move(message)});
  if (severity == Severity::Error) ok = false;
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

namespace {

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string format_bound(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

ValidationReport validate_record(const MetadataRecord& record, const LagoProfile& profile) {
  ValidationReport report;
  std::set<std::string> present;
  std::size_t pid_fields = 0;

  for (std::size_t i = 0; i < record.fields.size(); ++i) {
    const auto& f = record.fields[i];
    const auto key = f.key();
    const auto path = key + "[" + std::to_string(i) + "]";
    const auto value = trim(f.value);

    if (!is_field_name(f.element) || (f.qualifier && !is_field_name(*f.qualifier))) {
      report.add(Severity::Error, path, "malformed field name '" + key + "'");
      continue;
    }
    if (value.empty()) {
      report.add(Severity::Error, path, "empty value");
      continue;
    }
    present.insert(key);
    if (key == kPidFieldKey) ++pid_fields;

    if (!profile.knows(key)) report.add(Severity::Warning, path, "field not defined by profile " + profile.name);

    if (auto it = profile.formats.find(key); it != profile.formats.end()) {
      if (it->second == ValueFormat::Date && !is_calendar_date(value))
        report.add(Severity::Error, path, "expected date YYYY-MM-DD, got '" + std::string(value) + "'");
      if (it->second == ValueFormat::Token && !is_token(value))
        report.add(Severity::Error, path, "expected token [A-Za-z0-9._-]+, got '" + std::string(value) + "'");
    }
    if (auto it = profile.vocabularies.find(key); it != profile.vocabularies.end()) {
      if (it->second.count(std::string(value)) == 0)
        report.add(Severity::Error, path, "'" + std::string(value) + "' is not in the controlled vocabulary");
    }
    if (auto it = profile.ranges.find(key); it != profile.ranges.end()) {
      double v = 0;
      if (!parse_number(value, v))
        report.add(Severity::Error, path, "expected a number, got '" + std::string(value) + "'");
      else if (v < it->second.min || v > it->second.max)
        report.add(Severity::Error, path,
                   std::string(value) + " outside [" + format_bound(it->second.min) + ", " +
                       format_bound(it->second.max) + "] " + it->second.unit);
    }
  }

  for (const auto& key : profile.required)
    if (present.count(key) == 0) report.add(Severity::Error, key, "required field missing");
  if (pid_fields > 1) report.add(Severity::Error, std::string(kPidFieldKey), "more than one persistent identifier");
  return report;
}

namespace {

std::string summarize(const ValidationReport& report) {
  std::string s = "metadata failed validation with " + std::to_string(report.error_count()) + " error(s)";
  for (const auto& i : report.issues)
    if (i.severity == Severity::Error) return s + "; first: " + i.field_path + ": " + i.message;
  return s;
}

}  // namespace

ValidationRejected::ValidationRejected(ValidationReport report)
    : Error(ErrorCode::ValidationRejected, summarize(report)), report_(std::move(report)) {}

}  // namespace lago::metadata
