#include "lago/pid/handle.hpp"

#include <algorithm>

#include "lago/common/error.hpp"
#include "lago/common/strings.hpp"

namespace lago::pid {

const HandleValue* Handle::template_value() const {
  for (const auto& v : values)
    if (v.type == kTemplateType) return &v;
  return nullptr;
}

bool is_handle_prefix(std::string_view s) {
  return !s.empty() && s.front() != '.' && s.back() != '.' &&
         std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.'; });
}

bool is_suffix_segment(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
           c == '~' || c == '-';
  });
}

HandleName HandleName::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos)
    throw Error(ErrorCode::InvalidHandle, "handle needs <prefix>/<suffix>: '" + std::string(text) + "'", std::string(text));
  HandleName name;
  name.prefix = std::string(text.substr(0, slash));
  if (!is_handle_prefix(name.prefix))
    throw Error(ErrorCode::InvalidHandle, "malformed prefix '" + name.prefix + "'", std::string(text));
  name.segments = split(text.substr(slash + 1), '/');
  for (const auto& seg : name.segments)
    if (!is_suffix_segment(seg))
      throw Error(ErrorCode::InvalidHandle, "malformed suffix segment '" + seg + "'", std::string(text));
  return name;
}

std::string HandleName::suffix() const { return join(segments, "/"); }

std::string HandleName::key(std::size_t n) const {
  std::string k = prefix + "/";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) k += '/';
    k += to_lower(segments[i]);
  }
  return k;
}

TemplateRule TemplateRule::parse(std::string_view data) {
  TemplateRule rule;
  bool has_part = false;
  for (const auto& raw : split(data, '\n')) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw Error(ErrorCode::InvalidValue, "template line is not TYPE=pattern: '" + std::string(line) + "'");
    Line l{std::string(line.substr(0, eq)), std::string(line.substr(eq + 1))};
    if (l.type == kTemplateType) throw Error(ErrorCode::InvalidValue, "a template cannot derive another template");
    if (l.pattern.find(kPartToken) != std::string::npos) has_part = true;
    rule.lines.push_back(std::move(l));
  }
  if (!has_part) throw Error(ErrorCode::InvalidValue, "template has no {part} placeholder");
  return rule;
}

std::vector<HandleValue> TemplateRule::expand(std::string_view part, Timestamp stamp) const {
  std::vector<HandleValue> out;
  int index = 1;
  for (const auto& l : lines) {
    std::string data;
    std::string_view rest = l.pattern;
    for (auto pos = rest.find(kPartToken); pos != std::string_view::npos; pos = rest.find(kPartToken)) {
      data += rest.substr(0, pos);
      data += part;
      rest.remove_prefix(pos + kPartToken.size());
    }
    data += rest;
    out.push_back(HandleValue{index++, l.type, std::move(data), stamp});
  }
  return out;
}

}  // namespace lago::pid
