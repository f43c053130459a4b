#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "lago/common/time.hpp"
#include "lago/oaipmh/model.hpp"
#include "lago/store/store.hpp"

namespace lago::oaipmh {

// Everything needed to continue an incomplete list without server state.
struct TokenState {
  Verb verb = Verb::ListRecords;
  std::string metadata_prefix;
  std::optional<Timestamp> from;
  std::optional<Timestamp> until;
  std::optional<std::string> set;
  // Records already delivered before the page this token continues with.
  std::size_t cursor = 0;
  // Last (datestamp, uuid) delivered; the next page starts strictly after it.
  store::ItemKey last;
  Timestamp issued{};
  Timestamp expires{};

  // Hash over the selective-harvest arguments the token is bound to.
  std::string query_hash() const;

  friend bool operator==(const TokenState&, const TokenState&) = default;
};

// Stateless tokens: base64url(JSON state) "." hex HMAC-SHA256 of the first
// part under the node secret. Any edit to either part fails verification.
class TokenCodec {
 public:
  explicit TokenCodec(std::string secret) : secret_(std::move(secret)) {}

  std::string encode(const TokenState& state) const;
  // Integrity and structure only; expiry is checked by the caller.
  std::optional<TokenState> decode(std::string_view token) const;

 private:
  std::string secret_;
};

std::string base64url_encode(std::string_view bytes);
std::optional<std::string> base64url_decode(std::string_view text);

}  // namespace lago::oaipmh
