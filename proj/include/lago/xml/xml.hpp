#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lago::xml {

// Minimal element tree shared by every wire format in the node. Elements hold
// either text or children; whitespace between child elements is dropped on
// parse. Attribute order is preserved so serialization is deterministic.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;
  // Byte offset of the start tag in the parsed source.
  std::size_t offset = 0;

  Element() = default;
  explicit Element(std::string n) : name(std::move(n)) {}
  Element(std::string n, std::string t) : name(std::move(n)), text(std::move(t)) {}

  // Name without namespace prefix.
  std::string_view local_name() const;
  std::string_view prefix() const;

  const std::string* attribute(std::string_view name) const;
  Element& set_attribute(std::string name, std::string value);

  Element& add(Element child);
  Element& add(std::string name, std::string text);

  // First/all children matching a local name.
  const Element* child(std::string_view local) const;
  std::vector<const Element*> children_named(std::string_view local) const;

  // Namespace URI bound to this element's prefix, searching `scope` (the
  // element's ancestors, innermost last) when it is not declared locally.
  std::string namespace_uri(const std::vector<const Element*>& scope = {}) const;

  friend bool operator==(const Element&, const Element&) = default;
};

// Throws Error(MalformedXml) with the byte offset as subject.
Element parse(std::string_view document);

// Well-formed UTF-8 made only of characters XML 1.0 allows.
bool is_xml_text(std::string_view text);

// Anything that is not XML text is replaced by U+FFFD.
std::string escape(std::string_view text);

struct WriteOptions {
  bool declaration = true;
  bool indent = true;
};

std::string serialize(const Element& root, WriteOptions options = {});

}  // namespace lago::xml
