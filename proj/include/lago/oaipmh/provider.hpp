#pragma once

#include <chrono>
#include <string>

#include "lago/http/http.hpp"
#include "lago/oaipmh/model.hpp"
#include "lago/oaipmh/token.hpp"
#include "lago/store/store.hpp"

namespace lago::oaipmh {

inline constexpr std::string_view kLagoPrefix = "lago";
inline constexpr std::string_view kOaiDcPrefix = "oai_dc";

struct ProviderConfig {
  std::string repository_name;
  std::string base_url;  // e.g. http://host:port/oai
  std::string admin_email = "repository-admin@localhost";
  std::size_t page_size = 100;
  std::chrono::seconds token_ttl{3600};
};

// OAI-PMH 2.0 data provider over a Store. Stateless per request; every input,
// however malformed, produces an OAI-PMH document.
class Provider {
 public:
  Provider(const store::Store& store, ProviderConfig config, TokenCodec tokens);

  Response respond(const http::QueryParams& params) const;
  std::string handle(const http::QueryParams& params) const;
  // GET or POST /oai
  http::Response handle_http(const http::Request& request) const;

  const ProviderConfig& config() const { return config_; }

 private:
  Response dispatch(const http::QueryParams& params, Response& base) const;
  IdentifyInfo identify() const;
  Record make_record(const store::Item& item, std::string_view prefix, bool with_metadata) const;
  Header make_header(const store::Item& item) const;
  void list(Verb verb, const http::QueryParams& params, Response& out) const;

  const store::Store& store_;
  ProviderConfig config_;
  TokenCodec tokens_;
};

// Metadata payload in `prefix` for a stored item.
xml::Element metadata_payload(const store::Item& item, std::string_view prefix);

}  // namespace lago::oaipmh
