#include "lago/metadata/serialize.hpp"

#include <array>

#include "lago/common/digest.hpp"
#include "lago/common/error.hpp"

namespace lago::metadata {

namespace {

constexpr std::array<std::string_view, 15> kDcElements{
    "contributor", "coverage", "creator", "date",   "description", "format",  "identifier", "language",
    "publisher",   "relation", "rights",  "source", "subject",     "title",   "type"};

[[noreturn]] void schema_error(const std::string& what, std::size_t offset) {
  throw Error(ErrorCode::SchemaError, what + " at byte offset " + std::to_string(offset), std::to_string(offset));
}

}  // namespace

bool is_dc_element(std::string_view element) {
  for (auto e : kDcElements)
    if (e == element) return true;
  return false;
}

std::vector<DcValue> flatten_to_dc(const MetadataRecord& record) {
  std::vector<DcValue> out;
  out.reserve(record.fields.size());
  for (const auto& f : record.fields) {
    if (is_dc_element(f.element))
      out.push_back(DcValue{f.element, f.value, f.language});
    else
      out.push_back(DcValue{"description", f.key() + "=" + f.value, f.language});
  }
  return out;
}

xml::Element to_oai_dc(const MetadataRecord& record) {
  xml::Element root("oai_dc:dc");
  root.set_attribute("xmlns:oai_dc", std::string(kOaiDcNamespace));
  root.set_attribute("xmlns:dc", std::string(kDcNamespace));
  root.set_attribute("xmlns:xsi", std::string(kXsiNamespace));
  root.set_attribute("xsi:schemaLocation", std::string(kOaiDcNamespace) + " " + std::string(kOaiDcSchema));
  for (auto& v : flatten_to_dc(record)) {
    auto& e = root.add("dc:" + v.element, v.value);
    if (v.language) e.set_attribute("xml:lang", *v.language);
  }
  return root;
}

std::string to_oai_dc_xml(const MetadataRecord& record) { return xml::serialize(to_oai_dc(record)); }

xml::Element to_lago(const LagoDocument& doc) {
  xml::Element root("lago");
  root.set_attribute("xmlns", std::string(kLagoNamespace));
  if (doc.provenance) {
    auto& p = root.add(xml::Element("provenance"));
    p.set_attribute("node", doc.provenance->node_name);
    if (doc.provenance->original_identifier) p.set_attribute("originalIdentifier", *doc.provenance->original_identifier);
    if (doc.provenance->via_identifier) p.set_attribute("via", *doc.provenance->via_identifier);
  }
  for (const auto& f : doc.record.fields) {
    auto& e = root.add("field", f.value);
    e.set_attribute("element", f.element);
    if (f.qualifier) e.set_attribute("qualifier", *f.qualifier);
    if (f.language) e.set_attribute("lang", *f.language);
  }
  for (const auto& b : doc.bitstreams) {
    auto& e = root.add(xml::Element("bitstream"));
    e.set_attribute("name", b.name);
    e.set_attribute("size", std::to_string(b.size_bytes));
    e.set_attribute("md5", b.md5);
    e.set_attribute("mediaType", b.media_type);
  }
  return root;
}

std::string to_lago_xml(const MetadataRecord& record) { return xml::serialize(to_lago(LagoDocument{record, {}, {}})); }

std::string to_lago_xml(const LagoDocument& doc) { return xml::serialize(to_lago(doc)); }

LagoDocument parse_lago_document(const xml::Element& root) {
  if (root.local_name() != "lago") schema_error("unknown root element <" + root.name + ">", root.offset);
  const auto ns = root.namespace_uri();
  if (!ns.empty() && ns != kLagoNamespace) schema_error("root element in foreign namespace '" + ns + "'", root.offset);

  LagoDocument doc;
  for (const auto& c : root.children) {
    const auto local = c.local_name();
    if (local == "field") {
      MetadataField f;
      for (const auto& [k, v] : c.attributes) {
        if (k == "element")
          f.element = v;
        else if (k == "qualifier")
          f.qualifier = v;
        else if (k == "lang")
          f.language = v;
        else
          schema_error("unexpected attribute '" + k + "' on <field>", c.offset);
      }
      if (f.element.empty()) schema_error("<field> without element attribute", c.offset);
      if (!is_field_name(f.element)) schema_error("malformed element attribute '" + f.element + "'", c.offset);
      if (f.qualifier && !is_field_name(*f.qualifier))
        schema_error("malformed qualifier attribute '" + *f.qualifier + "'", c.offset);
      if (!c.children.empty()) schema_error("<field> must contain text only", c.offset);
      f.value = c.text;
      doc.record.fields.push_back(std::move(f));
    } else if (local == "provenance") {
      if (doc.provenance) schema_error("duplicate <provenance>", c.offset);
      const auto* node = c.attribute("node");
      if (!node || node->empty()) schema_error("<provenance> without node attribute", c.offset);
      OriginTag tag{*node, {}, {}};
      if (const auto* o = c.attribute("originalIdentifier")) tag.original_identifier = *o;
      if (const auto* v = c.attribute("via")) tag.via_identifier = *v;
      doc.provenance = std::move(tag);
    } else if (local == "bitstream") {
      const auto* name = c.attribute("name");
      const auto* size = c.attribute("size");
      const auto* md5 = c.attribute("md5");
      const auto* media = c.attribute("mediaType");
      if (!name || !size || !md5 || !media) schema_error("<bitstream> missing attributes", c.offset);
      if (!is_lower_hex(*md5, 32)) schema_error("<bitstream> md5 is not 32 lowercase hex characters", c.offset);
      std::uint64_t bytes = 0;
      try {
        std::size_t used = 0;
        bytes = std::stoull(*size, &used);
        if (used != size->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        schema_error("<bitstream> size is not an integer", c.offset);
      }
      doc.bitstreams.push_back(BitstreamRef{*name, bytes, *md5, *media});
    } else {
      schema_error("unexpected element <" + c.name + ">", c.offset);
    }
  }
  doc.record = canonicalize(std::move(doc.record));
  return doc;
}

LagoDocument parse_lago_document(std::string_view text) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaError, e.what(), e.subject());
  }
  return parse_lago_document(root);
}

MetadataRecord parse_lago_xml(std::string_view text) { return parse_lago_document(text).record; }

}  // namespace lago::metadata
