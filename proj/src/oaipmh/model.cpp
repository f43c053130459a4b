#include "lago/oaipmh/model.hpp"

#include <array>

#include "lago/common/error.hpp"

namespace lago::oaipmh {

namespace {

constexpr std::array<std::string_view, 6> kVerbs{"Identify",        "ListMetadataFormats", "ListSets",
                                                 "ListIdentifiers", "ListRecords",         "GetRecord"};

constexpr std::array<std::string_view, 8> kErrors{"badVerb",        "badArgument",       "badResumptionToken",
                                                  "cannotDisseminateFormat", "idDoesNotExist", "noRecordsMatch",
                                                  "noMetadataFormats",       "noSetHierarchy"};

[[noreturn]] void protocol_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ProtocolError, path + ": " + what, path);
}

const xml::Element& required(const xml::Element& parent, std::string_view local, const std::string& path) {
  const auto* e = parent.child(local);
  if (!e) protocol_error(path + "/" + std::string(local), "missing mandatory element " + std::string(local));
  return *e;
}

Timestamp parse_date(const xml::Element& e, const std::string& path) {
  auto d = parse_oai_date(e.text);
  if (!d) protocol_error(path, "bad date '" + e.text + "'");
  return d->value;
}

std::size_t parse_count(const std::string& text, const std::string& path) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    protocol_error(path, "not a count: '" + text + "'");
  }
}

// --- render ---------------------------------------------------------------

xml::Element render_header(const Header& h) {
  xml::Element e("header");
  if (h.deleted) e.set_attribute("status", "deleted");
  e.add("identifier", h.identifier);
  e.add("datestamp", format_datestamp(h.datestamp));
  for (const auto& s : h.set_specs) e.add("setSpec", s);
  return e;
}

xml::Element render_record(const Record& r) {
  xml::Element e("record");
  e.add(render_header(r.header));
  if (r.metadata) e.add(xml::Element("metadata")).add(*r.metadata);
  for (const auto& a : r.about) e.add(xml::Element("about")).add(a);
  return e;
}

void render_token(xml::Element& parent, const std::optional<ResumptionToken>& token) {
  if (!token) return;
  auto& t = parent.add("resumptionToken", token->value);
  if (token->expiration) t.set_attribute("expirationDate", format_datestamp(*token->expiration));
  if (token->complete_list_size) t.set_attribute("completeListSize", std::to_string(*token->complete_list_size));
  if (token->cursor) t.set_attribute("cursor", std::to_string(*token->cursor));
}

struct PayloadRenderer {
  xml::Element& root;

  void operator()(const std::monostate&) const {}
  void operator()(const IdentifyInfo& info) const {
    auto& e = root.add(xml::Element("Identify"));
    e.add("repositoryName", info.repository_name);
    e.add("baseURL", info.base_url);
    e.add("protocolVersion", info.protocol_version);
    for (const auto& a : info.admin_emails) e.add("adminEmail", a);
    e.add("earliestDatestamp", format_datestamp(info.earliest_datestamp));
    e.add("deletedRecord", info.deleted_record);
    e.add("granularity", info.granularity);
    for (const auto& d : info.descriptions) e.add(xml::Element("description")).add(d);
  }
  void operator()(const ListMetadataFormatsPayload& p) const {
    auto& e = root.add(xml::Element("ListMetadataFormats"));
    for (const auto& f : p.formats) {
      auto& mf = e.add(xml::Element("metadataFormat"));
      mf.add("metadataPrefix", f.prefix);
      mf.add("schema", f.schema);
      mf.add("metadataNamespace", f.namespace_uri);
    }
  }
  void operator()(const ListSetsPayload& p) const {
    auto& e = root.add(xml::Element("ListSets"));
    for (const auto& s : p.sets) {
      auto& se = e.add(xml::Element("set"));
      se.add("setSpec", s.spec);
      se.add("setName", s.name);
    }
    render_token(e, p.token);
  }
  void operator()(const ListIdentifiersPayload& p) const {
    auto& e = root.add(xml::Element("ListIdentifiers"));
    for (const auto& h : p.headers) e.add(render_header(h));
    render_token(e, p.token);
  }
  void operator()(const ListRecordsPayload& p) const {
    auto& e = root.add(xml::Element("ListRecords"));
    for (const auto& r : p.records) e.add(render_record(r));
    render_token(e, p.token);
  }
  void operator()(const GetRecordPayload& p) const {
    root.add(xml::Element("GetRecord")).add(render_record(p.record));
  }
};

// --- parse ----------------------------------------------------------------

Header parse_header(const xml::Element& e, const std::string& path) {
  Header h;
  if (const auto* status = e.attribute("status")) {
    if (*status != "deleted") protocol_error(path, "unknown header status '" + *status + "'");
    h.deleted = true;
  }
  h.identifier = required(e, "identifier", path).text;
  h.datestamp = parse_date(required(e, "datestamp", path), path + "/datestamp");
  for (const auto* s : e.children_named("setSpec")) h.set_specs.push_back(s->text);
  return h;
}

Record parse_record(const xml::Element& e, const std::string& path) {
  Record r;
  r.header = parse_header(required(e, "header", path), path + "/header");
  if (const auto* m = e.child("metadata")) {
    if (m->children.size() != 1) protocol_error(path + "/metadata", "metadata must hold exactly one element");
    r.metadata = m->children.front();
  }
  for (const auto* a : e.children_named("about"))
    if (!a->children.empty()) r.about.push_back(a->children.front());
  return r;
}

std::optional<ResumptionToken> parse_token(const xml::Element& parent, const std::string& path) {
  const auto* t = parent.child("resumptionToken");
  if (!t) return std::nullopt;
  const auto p = path + "/resumptionToken";
  ResumptionToken token;
  token.value = t->text;
  if (const auto* v = t->attribute("completeListSize")) token.complete_list_size = parse_count(*v, p);
  if (const auto* v = t->attribute("cursor")) token.cursor = parse_count(*v, p);
  if (const auto* v = t->attribute("expirationDate")) {
    auto d = parse_oai_date(*v);
    if (!d) protocol_error(p, "bad expirationDate");
    token.expiration = d->value;
  }
  return token;
}

Payload parse_payload(const xml::Element& e, Verb verb, const std::string& path) {
  switch (verb) {
    case Verb::Identify: {
      IdentifyInfo info;
      info.repository_name = required(e, "repositoryName", path).text;
      info.base_url = required(e, "baseURL", path).text;
      info.protocol_version = required(e, "protocolVersion", path).text;
      for (const auto* a : e.children_named("adminEmail")) info.admin_emails.push_back(a->text);
      info.earliest_datestamp = parse_date(required(e, "earliestDatestamp", path), path + "/earliestDatestamp");
      info.deleted_record = required(e, "deletedRecord", path).text;
      info.granularity = required(e, "granularity", path).text;
      for (const auto* d : e.children_named("description"))
        if (!d->children.empty()) info.descriptions.push_back(d->children.front());
      return info;
    }
    case Verb::ListMetadataFormats: {
      ListMetadataFormatsPayload p;
      std::size_t i = 0;
      for (const auto* f : e.children_named("metadataFormat")) {
        const auto fp = path + "/metadataFormat[" + std::to_string(i++) + "]";
        p.formats.push_back(MetadataFormat{required(*f, "metadataPrefix", fp).text, required(*f, "schema", fp).text,
                                           required(*f, "metadataNamespace", fp).text});
      }
      return p;
    }
    case Verb::ListSets: {
      ListSetsPayload p;
      std::size_t i = 0;
      for (const auto* s : e.children_named("set")) {
        const auto sp = path + "/set[" + std::to_string(i++) + "]";
        p.sets.push_back(SetInfo{required(*s, "setSpec", sp).text, required(*s, "setName", sp).text});
      }
      p.token = parse_token(e, path);
      return p;
    }
    case Verb::ListIdentifiers: {
      ListIdentifiersPayload p;
      std::size_t i = 0;
      for (const auto* h : e.children_named("header"))
        p.headers.push_back(parse_header(*h, path + "/header[" + std::to_string(i++) + "]"));
      p.token = parse_token(e, path);
      return p;
    }
    case Verb::ListRecords: {
      ListRecordsPayload p;
      std::size_t i = 0;
      for (const auto* r : e.children_named("record"))
        p.records.push_back(parse_record(*r, path + "/record[" + std::to_string(i++) + "]"));
      p.token = parse_token(e, path);
      return p;
    }
    case Verb::GetRecord:
      return GetRecordPayload{parse_record(required(e, "record", path), path + "/record")};
  }
  return std::monostate{};
}

}  // namespace

std::string_view to_string(Verb v) { return kVerbs[static_cast<std::size_t>(v)]; }

std::optional<Verb> parse_verb(std::string_view s) {
  for (std::size_t i = 0; i < kVerbs.size(); ++i)
    if (kVerbs[i] == s) return static_cast<Verb>(i);
  return std::nullopt;
}

std::string_view to_string(OaiErrorCode c) { return kErrors[static_cast<std::size_t>(c)]; }

std::optional<OaiErrorCode> parse_error_code(std::string_view s) {
  for (std::size_t i = 0; i < kErrors.size(); ++i)
    if (kErrors[i] == s) return static_cast<OaiErrorCode>(i);
  return std::nullopt;
}

bool Response::has_error(OaiErrorCode code) const {
  for (const auto& e : errors)
    if (e.code == code) return true;
  return false;
}

xml::Element render(const Response& response) {
  xml::Element root("OAI-PMH");
  root.set_attribute("xmlns", std::string(kOaiNamespace));
  root.set_attribute("xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance");
  root.set_attribute("xsi:schemaLocation", std::string(kOaiNamespace) + " " + std::string(kOaiSchema));
  root.add("responseDate", format_datestamp(response.response_date));
  auto& req = root.add("request", response.request_url);
  for (const auto& [k, v] : response.request_arguments) req.set_attribute(k, v);
  for (const auto& e : response.errors) root.add("error", e.message).set_attribute("code", std::string(to_string(e.code)));
  std::visit(PayloadRenderer{root}, response.payload);
  for (const auto& u : response.unknown) root.add(u);
  return root;
}

std::string render_oai_response(const Response& response) { return xml::serialize(render(response)); }

Response parse_oai_response(const xml::Element& root) {
  if (root.local_name() != "OAI-PMH") protocol_error("OAI-PMH", "root element is <" + root.name + ">");
  Response r;
  const std::string path = "OAI-PMH";
  r.response_date = parse_date(required(root, "responseDate", path), path + "/responseDate");
  const auto& req = required(root, "request", path);
  r.request_url = req.text;
  for (const auto& [k, v] : req.attributes) r.request_arguments.emplace_back(k, v);

  for (const auto& c : root.children) {
    const auto local = c.local_name();
    if (local == "responseDate" || local == "request") continue;
    if (local == "error") {
      const auto* code = c.attribute("code");
      if (!code) protocol_error(path + "/error", "error without code");
      auto parsed = parse_error_code(*code);
      if (!parsed) protocol_error(path + "/error", "unknown error code '" + *code + "'");
      r.errors.push_back(OaiError{*parsed, c.text});
    } else if (auto verb = parse_verb(local)) {
      if (!std::holds_alternative<std::monostate>(r.payload)) protocol_error(path + "/" + c.name, "second payload");
      r.payload = parse_payload(c, *verb, path + "/" + std::string(local));
    } else {
      r.unknown.push_back(c);
    }
  }
  if (r.errors.empty() && std::holds_alternative<std::monostate>(r.payload))
    protocol_error(path, "neither error nor verb payload present");
  return r;
}

Response parse_oai_response(std::string_view text) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::ProtocolError, e.what(), "OAI-PMH");
  }
  return parse_oai_response(root);
}

}  // namespace lago::oaipmh
