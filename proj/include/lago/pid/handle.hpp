#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lago/common/time.hpp"

namespace lago::pid {

struct HandleValue {
  int index = 0;  // 0 on input means "assign the next free index"
  std::string type;
  std::string data;
  Timestamp timestamp{};

  friend bool operator==(const HandleValue&, const HandleValue&) = default;
};

struct Handle {
  std::string prefix;
  std::string suffix;
  std::vector<HandleValue> values;

  std::string text() const { return prefix + "/" + suffix; }
  const HandleValue* template_value() const;

  friend bool operator==(const Handle&, const Handle&) = default;
};

// Parsed handle text: prefix `[0-9.]+`, suffix segments `[A-Za-z0-9._~-]+`
// joined by '/'.
struct HandleName {
  std::string prefix;
  std::vector<std::string> segments;

  // Throws Error(InvalidHandle).
  static HandleName parse(std::string_view text);

  std::string suffix() const;
  std::string text() const { return prefix + "/" + suffix(); }
  // Case-insensitive registry key for the first `n` segments.
  std::string key(std::size_t n) const;
  std::string key() const { return key(segments.size()); }
};

bool is_handle_prefix(std::string_view s);
bool is_suffix_segment(std::string_view s);

inline constexpr std::string_view kTemplateType = "TEMPLATE";
inline constexpr std::string_view kPartToken = "{part}";

// A TEMPLATE value's data: one or more "TYPE=pattern" lines. Throws
// Error(InvalidValue) when malformed or when no pattern mentions {part}.
struct TemplateRule {
  struct Line {
    std::string type;
    std::string pattern;
  };
  std::vector<Line> lines;

  static TemplateRule parse(std::string_view data);
  std::vector<HandleValue> expand(std::string_view part, Timestamp stamp) const;
};

}  // namespace lago::pid
