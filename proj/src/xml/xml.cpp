#include "lago/xml/xml.hpp"

#include <expat.h>

#include <memory>

#include "lago/common/error.hpp"

namespace lago::xml {

std::string_view Element::local_name() const {
  std::string_view n = name;
  auto pos = n.find(':');
  return pos == std::string_view::npos ? n : n.substr(pos + 1);
}

std::string_view Element::prefix() const {
  std::string_view n = name;
  auto pos = n.find(':');
  return pos == std::string_view::npos ? std::string_view{} : n.substr(0, pos);
}

const std::string* Element::attribute(std::string_view attr) const {
  for (const auto& [k, v] : attributes)
    if (k == attr) return &v;
  return nullptr;
}

Element& Element::set_attribute(std::string attr, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == attr) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(attr), std::move(value));
  return *this;
}

Element& Element::add(Element child) {
  children.push_back(std::move(child));
  return children.back();
}

Element& Element::add(std::string n, std::string t) { return add(Element(std::move(n), std::move(t))); }

const Element* Element::child(std::string_view local) const {
  for (const auto& c : children)
    if (c.local_name() == local) return &c;
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view local) const {
  std::vector<const Element*> out;
  for (const auto& c : children)
    if (c.local_name() == local) out.push_back(&c);
  return out;
}

std::string Element::namespace_uri(const std::vector<const Element*>& scope) const {
  const std::string key = prefix().empty() ? "xmlns" : "xmlns:" + std::string(prefix());
  if (const auto* v = attribute(key)) return *v;
  for (auto it = scope.rbegin(); it != scope.rend(); ++it)
    if (const auto* v = (*it)->attribute(key)) return *v;
  return {};
}

namespace {

struct ParseState {
  XML_Parser parser = nullptr;
  std::vector<Element> stack;
  Element root;
  bool have_root = false;
};

bool all_space(const std::string& s) {
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  return true;
}

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(user);
  Element e(name);
  e.offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(st->parser));
  for (int i = 0; attrs[i]; i += 2) e.attributes.emplace_back(attrs[i], attrs[i + 1]);
  st->stack.push_back(std::move(e));
}

void on_end(void* user, const XML_Char*) {
  auto* st = static_cast<ParseState*>(user);
  Element e = std::move(st->stack.back());
  st->stack.pop_back();
  if (!e.children.empty() && all_space(e.text)) e.text.clear();
  if (st->stack.empty()) {
    st->root = std::move(e);
    st->have_root = true;
  } else {
    st->stack.back().children.push_back(std::move(e));
  }
}

void on_text(void* user, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(user);
  if (!st->stack.empty()) st->stack.back().text.append(s, static_cast<std::size_t>(len));
}

// DOCTYPE declarations are refused outright: no entity expansion from input.
void on_doctype(void* user, const XML_Char*, const XML_Char*, const XML_Char*, int) {
  auto* st = static_cast<ParseState*>(user);
  XML_StopParser(st->parser, XML_FALSE);
}

}  // namespace

Element parse(std::string_view document) {
  ParseState st;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw Error(ErrorCode::MalformedXml, "cannot allocate XML parser", "0");
  st.parser = parser.get();
  XML_SetUserData(st.parser, &st);
  XML_SetElementHandler(st.parser, on_start, on_end);
  XML_SetCharacterDataHandler(st.parser, on_text);
  XML_SetStartDoctypeDeclHandler(st.parser, on_doctype);
  const auto status = XML_Parse(st.parser, document.data(), static_cast<int>(document.size()), XML_TRUE);
  if (status != XML_STATUS_OK || !st.have_root) {
    const auto offset = std::to_string(XML_GetCurrentByteIndex(st.parser) < 0 ? 0 : XML_GetCurrentByteIndex(st.parser));
    std::string reason = status == XML_STATUS_OK ? "no root element" : XML_ErrorString(XML_GetErrorCode(st.parser));
    if (XML_GetErrorCode(st.parser) == XML_ERROR_ABORTED) reason = "DOCTYPE declarations are not accepted";
    throw Error(ErrorCode::MalformedXml, reason + " at byte offset " + offset, offset);
  }
  return std::move(st.root);
}

namespace {

// Length of the XML Char encoded at s[i], or 0 when the bytes there are not
// well-formed UTF-8 or encode a code point XML 1.0 forbids.
std::size_t xml_char_length(std::string_view s, std::size_t i) {
  const auto b = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char c = b(i);
  std::size_t n;
  char32_t cp;
  if (c < 0x80) {
    if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') return 0;
    return 1;
  } else if ((c & 0xe0) == 0xc0) {
    n = 2, cp = c & 0x1f;
  } else if ((c & 0xf0) == 0xe0) {
    n = 3, cp = c & 0x0f;
  } else if ((c & 0xf8) == 0xf0) {
    n = 4, cp = c & 0x07;
  } else {
    return 0;
  }
  if (i + n > s.size()) return 0;
  for (std::size_t k = 1; k < n; ++k) {
    if ((b(i + k) & 0xc0) != 0x80) return 0;
    cp = (cp << 6) | (b(i + k) & 0x3f);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[n] || cp > 0x10ffff) return 0;
  if ((cp >= 0xd800 && cp <= 0xdfff) || cp == 0xfffe || cp == 0xffff) return 0;
  return n;
}

}  // namespace

bool is_xml_text(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    const auto n = xml_char_length(text, i);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const auto n = xml_char_length(text, i);
    if (n == 0) {
      out += "\xEF\xBF\xBD";
      ++i;
      continue;
    }
    if (n > 1) {
      out.append(text.substr(i, n));
      i += n;
      continue;
    }
    const char c = text[i++];
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace {

void write(const Element& e, std::string& out, int depth, bool indent) {
  if (indent) out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>";
  } else if (e.children.empty()) {
    out += '>';
    out += escape(e.text);
    out += "</" + e.name + '>';
  } else {
    out += '>';
    if (indent) out += '\n';
    for (const auto& c : e.children) write(c, out, depth + 1, indent);
    if (indent) out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "</" + e.name + '>';
  }
  if (indent) out += '\n';
}

}  // namespace

std::string serialize(const Element& root, WriteOptions options) {
  std::string out;
  if (options.declaration) out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write(root, out, 0, options.indent);
  return out;
}

}  // namespace lago::xml
