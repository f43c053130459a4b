#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace lago::oaipmh {

// oai:<nodeName>:<uuid>
struct OaiIdentifier {
  std::string node;
  std::string uuid;

  static std::optional<OaiIdentifier> parse(std::string_view text);
  std::string text() const { return "oai:" + node + ":" + uuid; }

  friend bool operator==(const OaiIdentifier&, const OaiIdentifier&) = default;
};

}  // namespace lago::oaipmh
