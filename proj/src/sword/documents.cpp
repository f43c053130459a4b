#include "lago/sword/documents.hpp"

#include "lago/metadata/serialize.hpp"
#include "lago/xml/xml.hpp"

namespace lago::sword {

namespace {

constexpr std::string_view kErrorUriPrefix = "urn:lago-repo:error:";

xml::Element parse_root(std::string_view text, std::string_view expected_local, std::string_view ns) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::ProtocolError, e.message(), std::string(expected_local));
  }
  if (root.local_name() != expected_local || root.namespace_uri() != ns)
    throw Error(ErrorCode::ProtocolError, "unexpected root element <" + root.name + ">", std::string(expected_local));
  return root;
}

const xml::Element& required(const xml::Element& parent, std::string_view local, const std::string& path) {
  const auto* c = parent.child(local);
  if (!c) throw Error(ErrorCode::ProtocolError, "missing <" + std::string(local) + ">", path + "/" + std::string(local));
  return *c;
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::ChecksumMismatch: return 412;
    case ErrorCode::UnsupportedPackaging: return 415;
    case ErrorCode::ValidationRejected: return 422;
    case ErrorCode::InvalidPackage: return 400;
    case ErrorCode::PackageTooLarge: return 413;
    case ErrorCode::UnknownCollection: return 404;
    case ErrorCode::MirrorCollection: return 403;
    default: return 500;
  }
}

std::string render_service_document(const ServiceDocument& doc) {
  xml::Element root("service");
  root.set_attribute("xmlns", std::string(kAppNamespace));
  root.set_attribute("xmlns:atom", std::string(kAtomNamespace));
  root.set_attribute("xmlns:sword", std::string(kSwordNamespace));
  root.add("sword:version", doc.version);
  root.add("sword:maxUploadSize", std::to_string(doc.max_upload_bytes / 1024));
  auto& ws = root.add(xml::Element("workspace"));
  ws.add("atom:title", doc.workspace_title);
  for (const auto& c : doc.collections) {
    auto& e = ws.add(xml::Element("collection"));
    e.set_attribute("href", c.href);
    e.add("atom:title", c.title);
    for (const auto& m : c.accepted_media_types) e.add("accept", m);
    for (const auto& p : c.accepted_packaging) e.add("sword:acceptPackaging", p).set_attribute("q", "1.0");
  }
  return xml::serialize(root);
}

ServiceDocument parse_service_document(std::string_view text) {
  const auto root = parse_root(text, "service", kAppNamespace);
  ServiceDocument doc;
  doc.version = required(root, "version", "service").text;
  try {
    doc.max_upload_bytes = std::stoull(required(root, "maxUploadSize", "service").text) * 1024;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::ProtocolError, "maxUploadSize is not a number", "service/maxUploadSize");
  }
  const auto& ws = required(root, "workspace", "service");
  if (const auto* t = ws.child("title")) doc.workspace_title = t->text;
  for (const auto* c : ws.children_named("collection")) {
    ServiceCollection sc;
    const auto* href = c->attribute("href");
    if (!href) throw Error(ErrorCode::ProtocolError, "collection without href", "service/workspace/collection");
    sc.href = *href;
    if (const auto* t = c->child("title")) sc.title = t->text;
    for (const auto* a : c->children_named("accept")) sc.accepted_media_types.push_back(a->text);
    for (const auto* p : c->children_named("acceptPackaging")) sc.accepted_packaging.push_back(p->text);
    doc.collections.push_back(std::move(sc));
  }
  return doc;
}

std::string render_receipt(const DepositReceipt& r) {
  xml::Element root("entry");
  root.set_attribute("xmlns", std::string(kAtomNamespace));
  root.set_attribute("xmlns:sword", std::string(kSwordNamespace));
  root.set_attribute("xmlns:lago", std::string(metadata::kLagoNamespace));
  root.add("id", "urn:uuid:" + r.item_uuid);
  root.add("title", r.oai_identifier);
  root.add("updated", format_datestamp(r.updated));
  auto& content = root.add(xml::Element("content"));
  content.set_attribute("type", std::string(kZipMediaType));
  content.set_attribute("src", r.location);
  auto& link = root.add(xml::Element("link"));
  link.set_attribute("rel", "alternate");
  link.set_attribute("href", r.location);
  root.add("sword:packaging", std::string(kPackaging));
  root.add("sword:treatment", r.treatment);
  root.add("lago:itemUuid", r.item_uuid);
  root.add("lago:oaiIdentifier", r.oai_identifier);
  if (r.pid) root.add("lago:pid", *r.pid);
  return xml::serialize(root);
}

DepositReceipt parse_receipt(std::string_view text) {
  const auto root = parse_root(text, "entry", kAtomNamespace);
  DepositReceipt r;
  r.item_uuid = required(root, "itemUuid", "entry").text;
  r.oai_identifier = required(root, "oaiIdentifier", "entry").text;
  if (const auto* p = root.child("pid")) r.pid = p->text;
  r.treatment = required(root, "treatment", "entry").text;
  const auto* src = required(root, "content", "entry").attribute("src");
  if (!src) throw Error(ErrorCode::ProtocolError, "content without src", "entry/content");
  r.location = *src;
  const auto updated = parse_datestamp(required(root, "updated", "entry").text);
  if (!updated) throw Error(ErrorCode::ProtocolError, "updated is not a datestamp", "entry/updated");
  r.updated = *updated;
  return r;
}

std::string render_error(const Error& error) {
  xml::Element root("sword:error");
  root.set_attribute("xmlns", std::string(kAtomNamespace));
  root.set_attribute("xmlns:sword", std::string(kSwordNamespace));
  root.set_attribute("href", std::string(kErrorUriPrefix) + std::string(to_string(error.code())));
  root.add("title", std::string(to_string(error.code())));
  root.add("summary", error.message());
  if (!error.subject().empty()) root.add("sword:verboseDescription", error.subject());
  if (const auto* rejected = dynamic_cast<const metadata::ValidationRejected*>(&error)) {
    for (const auto& issue : rejected->report().issues) {
      auto& e = root.add("issue", issue.message);
      e.set_attribute("severity", std::string(metadata::to_string(issue.severity)));
      e.set_attribute("field", issue.field_path);
    }
  }
  return xml::serialize(root);
}

void throw_error_document(std::string_view text, int status) {
  xml::Element root;
  try {
    root = parse_root(text, "error", kSwordNamespace);
  } catch (const Error&) {
    throw Error(ErrorCode::ProtocolError, "HTTP " + std::to_string(status) + " without a SWORD error document");
  }
  const auto* href = root.attribute("href");
  ErrorCode code = ErrorCode::ProtocolError;
  if (!href || !href->starts_with(kErrorUriPrefix) ||
      !parse_error_code(std::string_view(*href).substr(kErrorUriPrefix.size()), code))
    throw Error(ErrorCode::ProtocolError, "HTTP " + std::to_string(status) + " with an unrecognized error", "error");
  std::string message;
  if (const auto* s = root.child("summary")) message = s->text;
  std::string subject;
  if (const auto* d = root.child("verboseDescription")) subject = d->text;
  if (code == ErrorCode::ValidationRejected) {
    metadata::ValidationReport report;
    for (const auto* i : root.children_named("issue")) {
      const auto* sev = i->attribute("severity");
      const auto* field = i->attribute("field");
      report.add(sev && *sev == "warning" ? metadata::Severity::Warning : metadata::Severity::Error,
                 field ? *field : std::string{}, i->text);
    }
    throw metadata::ValidationRejected(std::move(report));
  }
  throw Error(code, message, subject);
}

}  // namespace lago::sword
