#include "lago/saf/saf.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"
#include "lago/metadata/serialize.hpp"
#include "lago/metadata/validate.hpp"
#include "lago/xml/xml.hpp"

namespace lago::saf {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::InvalidPackage, path + ": " + message, path);
}

std::vector<metadata::DcValue> parse_dublin_core(const std::string& text, const std::string& path) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  if (root.name != "dublin_core") invalid(path, "root element is <" + root.name + ">, expected <dublin_core>");
  std::vector<metadata::DcValue> out;
  for (const auto& c : root.children) {
    if (c.name != "dcvalue") invalid(path, "unexpected element <" + c.name + ">");
    const auto* element = c.attribute("element");
    if (!element || !metadata::is_dc_element(*element)) invalid(path, "dcvalue without a Dublin Core element");
    const auto* qualifier = c.attribute("qualifier");
    if (qualifier && *qualifier != "none") invalid(path, "qualified dcvalue '" + *element + "." + *qualifier + "'");
    metadata::DcValue v{*element, c.text, std::nullopt};
    if (const auto* lang = c.attribute("language")) v.language = *lang;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> parse_contents(const std::string& text, const std::string& path) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const std::string name = line.substr(0, tab);
    const std::string where = path + " line " + std::to_string(line_no);
    if (tab != std::string::npos && line.substr(tab + 1) != kBundle)
      invalid(path, "line " + std::to_string(line_no) + ": only " + std::string(kBundle) + " is supported");
    if (!is_safe_file_name(name) || is_control_file(name))
      invalid(path, "line " + std::to_string(line_no) + ": bad file name '" + name + "'");
    if (!seen.insert(name).second) invalid(path, "line " + std::to_string(line_no) + ": duplicate '" + name + "'");
    names.push_back(name);
  }
  return names;
}

std::string prefixed(std::string_view label, std::string_view name) {
  return label.empty() ? std::string(name) : std::string(label) + "/" + std::string(name);
}

}  // namespace

bool is_control_file(std::string_view name) {
  return name == kDublinCoreFile || name == kLagoFile || name == kContentsFile;
}

bool is_safe_file_name(std::string_view name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    return c == '/' || c == '\\' || c == ':' || static_cast<unsigned char>(c) < 0x20 || c == 0x7f;
  });
}

std::string dublin_core_xml(const metadata::MetadataRecord& record) {
  xml::Element root("dublin_core");
  for (const auto& v : metadata::flatten_to_dc(record)) {
    auto& e = root.add("dcvalue", v.value);
    e.set_attribute("element", v.element);
    e.set_attribute("qualifier", "none");
    if (v.language) e.set_attribute("language", *v.language);
  }
  return xml::serialize(root);
}

std::string contents_text(const std::vector<SafFile>& files) {
  std::string out;
  for (const auto& f : files) out += f.name + "\t" + std::string(kBundle) + "\n";
  return out;
}

void write_package(const fs::path& dir, const SafItem& item) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message(), dir.string());
  write_file_atomic(dir / kDublinCoreFile, dublin_core_xml(item.record));
  write_file_atomic(dir / kLagoFile, metadata::to_lago_xml(item.record));
  write_file_atomic(dir / kContentsFile, contents_text(item.files));
  for (const auto& f : item.files) {
    if (!is_safe_file_name(f.name) || is_control_file(f.name))
      throw Error(ErrorCode::InvalidValue, "unusable file name '" + f.name + "'", f.name);
    write_file_atomic(dir / f.name, f.bytes);
  }
}

SafItem parse_files(const std::vector<zip::Entry>& files, std::string_view label) {
  std::map<std::string, const zip::Entry*> by_name;
  for (const auto& e : files) {
    const auto path = prefixed(label, e.name);
    if (e.is_directory()) invalid(path, "nested directories are not allowed");
    if (!is_safe_file_name(e.name)) invalid(path, "file name is not a plain relative name");
    if (!by_name.emplace(e.name, &e).second) invalid(path, "duplicate entry");
  }
  for (auto control : {kDublinCoreFile, kLagoFile, kContentsFile})
    if (!by_name.count(std::string(control))) invalid(prefixed(label, control), "missing control file");

  const auto contents_path = prefixed(label, kContentsFile);
  const auto names = parse_contents(by_name.at(std::string(kContentsFile))->data, contents_path);
  const std::set<std::string> listed(names.begin(), names.end());
  for (const auto& name : names)
    if (!by_name.count(name)) invalid(prefixed(label, name), "listed in contents but absent");
  for (const auto& [name, entry] : by_name)
    if (!is_control_file(name) && !listed.count(name)) invalid(prefixed(label, name), "not listed in contents");

  SafItem item;
  const auto lago_path = prefixed(label, kLagoFile);
  try {
    item.record = metadata::parse_lago_xml(by_name.at(std::string(kLagoFile))->data);
  } catch (const Error& e) {
    invalid(lago_path, e.what());
  }

  const auto dc_path = prefixed(label, kDublinCoreFile);
  auto declared = parse_dublin_core(by_name.at(std::string(kDublinCoreFile))->data, dc_path);
  auto expected = metadata::flatten_to_dc(item.record);
  for (auto& v : declared) v.value = std::string(trim(v.value));
  std::sort(declared.begin(), declared.end());
  std::sort(expected.begin(), expected.end());
  if (declared != expected) {
    metadata::ValidationReport report;
    report.add(metadata::Severity::Error, std::string(kDublinCoreFile),
               "Dublin Core values disagree with " + std::string(kLagoFile));
    throw metadata::ValidationRejected(std::move(report));
  }

  for (const auto& name : names) item.files.push_back(SafFile{name, by_name.at(name)->data});
  return item;
}

SafItem parse_archive(const std::vector<zip::Entry>& entries) {
  std::optional<std::string> top;
  std::vector<zip::Entry> files;
  for (const auto& e : entries) {
    const auto slash = e.name.find('/');
    if (slash == std::string::npos || slash == 0) invalid(e.name, "entry outside the item directory");
    const auto dir = e.name.substr(0, slash);
    if (dir == "." || dir == ".." || e.name.find('\\') != std::string::npos) invalid(e.name, "unsafe path");
    if (top && *top != dir) invalid(e.name, "more than one top-level directory");
    top = dir;
    auto rest = e.name.substr(slash + 1);
    if (rest.empty()) continue;  // the directory entry itself
    files.push_back(zip::Entry{std::move(rest), e.data});
  }
  if (!top) invalid("<archive>", "archive holds no item directory");
  return parse_files(files, *top);
}

SafItem read_package(const fs::path& dir) {
  std::vector<zip::Entry> files;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot read " + dir.string() + ": " + ec.message(), dir.string());
  for (const auto& entry : it) {
    auto name = entry.path().filename().string();
    if (entry.is_directory())
      files.push_back(zip::Entry{name + "/", {}});
    else
      files.push_back(zip::Entry{name, read_file(entry.path())});
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return parse_files(files, dir.string());
}

std::string zip_package(const fs::path& dir) {
  auto name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  std::vector<zip::Entry> entries{zip::Entry{name + "/", {}}};
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot read " + dir.string() + ": " + ec.message(), dir.string());
  std::vector<zip::Entry> files;
  for (const auto& entry : it) {
    const auto file = entry.path().filename().string();
    if (entry.is_directory())
      files.push_back(zip::Entry{name + "/" + file + "/", {}});
    else
      files.push_back(zip::Entry{name + "/" + file, read_file(entry.path())});
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  entries.insert(entries.end(), files.begin(), files.end());
  return zip::write_archive(entries);
}

std::string zip_item(const std::string& dir_name, const SafItem& item) {
  std::vector<zip::Entry> entries{
      {dir_name + "/", {}},
      {dir_name + "/" + std::string(kContentsFile), contents_text(item.files)},
      {dir_name + "/" + std::string(kDublinCoreFile), dublin_core_xml(item.record)},
      {dir_name + "/" + std::string(kLagoFile), metadata::to_lago_xml(item.record)},
  };
  for (const auto& f : item.files) entries.push_back({dir_name + "/" + f.name, f.bytes});
  return zip::write_archive(entries);
}

}  // namespace lago::saf
