#include "lago/ingest/manifest.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"
#include "lago/metadata/validate.hpp"
#include "lago/saf/saf.hpp"

namespace lago::ingest {

namespace fs = std::filesystem;

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      n = 1, cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      n = 2, cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      n = 3, cp = c & 0x07;
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      if (i + k >= s.size()) return false;
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += n + 1;
  }
  return true;
}

const char* kFieldKeys[] = {nullptr, "title", "date.issued", "type", "coverage.site", "lago.detector", "lago.rcut",
                            "lago.altitude"};

std::vector<fs::path> source_files(const fs::path& source) {
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) return {source};
  if (!fs::is_directory(source, ec)) return {};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(source, ec)) {
    if (e.is_directory()) throw Error(ErrorCode::InvalidValue, "nested directory " + e.path().filename().string());
    if (e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  if (!valid_utf8(text)) throw Error(ErrorCode::ManifestUnreadable, "manifest is not valid UTF-8");

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  const auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          throw Error(ErrorCode::ManifestUnreadable,
                      "text after closing quote in CSV record " + std::to_string(rows.size() + 1));
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      ++i;
    } else if (c == '\r' || c == '\n') {
      end_row();
      i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (quoted) throw Error(ErrorCode::ManifestUnreadable, "unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

ManifestScan scan_manifest(const fs::path& csv_path, const metadata::LagoProfile& profile) {
  std::string text;
  try {
    text = read_file(csv_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ManifestUnreadable, e.message(), csv_path.string());
  }
  auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorCode::ManifestUnreadable, "manifest has no header row", csv_path.string());
  const auto& header = rows.front();
  constexpr std::size_t kFixed = std::size(kManifestColumns);
  for (std::size_t c = 0; c < kFixed; ++c) {
    if (c >= header.size() || trim(header[c]) != kManifestColumns[c])
      throw Error(ErrorCode::ManifestUnreadable,
                  "header column " + std::to_string(c + 1) + " must be '" + std::string(kManifestColumns[c]) + "'",
                  csv_path.string());
  }
  if (rows.size() == 1) throw Error(ErrorCode::ManifestEmpty, "manifest has no data rows", csv_path.string());

  const auto base = csv_path.parent_path();
  ManifestScan scan;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t row_no = r + 1;
    const auto& cells = rows[r];
    std::vector<std::string> problems;
    ItemDescriptor d;
    d.row = row_no;

    const std::string source = cells.empty() ? std::string{} : std::string(trim(cells[0]));
    if (source.empty()) {
      problems.push_back("sourcePath: source missing");
    } else {
      const fs::path path = fs::path(source).is_absolute() ? fs::path(source) : base / source;
      try {
        d.files = source_files(path);
        if (d.files.empty()) problems.push_back("sourcePath: source missing: " + source);
      } catch (const Error& e) {
        problems.push_back("sourcePath: " + e.message());
      }
      std::set<std::string> names;
      for (const auto& f : d.files) {
        const auto name = f.filename().string();
        if (!saf::is_safe_file_name(name) || saf::is_control_file(name))
          problems.push_back("sourcePath: unusable file name '" + name + "'");
        else if (!names.insert(name).second)
          problems.push_back("sourcePath: duplicate file name '" + name + "'");
      }
    }

    for (std::size_t c = 1; c < kFixed && c < cells.size(); ++c) {
      const auto value = trim(cells[c]);
      if (!value.empty()) d.record.add(kFieldKeys[c], std::string(value));
    }
    for (std::size_t c = kFixed; c < cells.size(); ++c) {
      const auto cell = trim(cells[c]);
      if (cell.empty()) continue;
      const auto eq = cell.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        problems.push_back("column " + std::to_string(c + 1) + ": extra field must be element.qualifier=value");
        continue;
      }
      d.record.fields.push_back(
          metadata::make_field(trim(cell.substr(0, eq)), std::string(trim(cell.substr(eq + 1)))));
    }

    const auto report = metadata::validate_record(d.record, profile);
    for (const auto& issue : report.issues)
      if (issue.severity == metadata::Severity::Error) problems.push_back(issue.field_path + ": " + issue.message);

    if (problems.empty()) {
      scan.descriptors.push_back(std::move(d));
    } else {
      for (auto& p : problems) scan.errors.push_back(RowError{row_no, "row " + std::to_string(row_no) + ": " + p});
    }
  }
  return scan;
}

}  // namespace lago::ingest
