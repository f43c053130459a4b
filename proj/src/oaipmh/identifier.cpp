#include "lago/oaipmh/identifier.hpp"

#include "lago/common/strings.hpp"

namespace lago::oaipmh {

std::optional<OaiIdentifier> OaiIdentifier::parse(std::string_view text) {
  if (text.substr(0, 4) != "oai:") return std::nullopt;
  text.remove_prefix(4);
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) return std::nullopt;
  OaiIdentifier id{std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
  if (!is_token(id.node) || !is_uuid(id.uuid)) return std::nullopt;
  return id;
}

}  // namespace lago::oaipmh
