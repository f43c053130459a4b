#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lago/http/http.hpp"
#include "lago/pid/registry.hpp"
#include "lago/store/store.hpp"
#include "lago/sword/documents.hpp"

namespace lago::sword {

struct DepositPackage {
  std::string bytes;
  std::string packaging{kPackaging};
  std::optional<std::string> declared_md5;
  std::optional<std::string> slug;
};

struct SwordConfig {
  // Node root URL; deposit and item locations are built from it.
  std::string base_url;
  std::string deposit_token;
  std::uint64_t max_upload_bytes = 256ull << 20;
};

// Public form of a minted handle, as written into identifier.uri.
std::string handle_uri(const std::string& handle_text);

class SwordServer {
 public:
  SwordServer(store::Store& store, pid::PidService& pids, SwordConfig config);

  // Throws Unauthorized.
  ServiceDocument service_document(const std::string& auth_token) const;

  // All-or-nothing: on any failure no item, blob or handle remains.
  DepositReceipt deposit(const std::string& collection_id, const DepositPackage& package,
                         const std::string& auth_token);

  // GET /sword/servicedocument, POST /sword/deposit/<collectionId>
  http::Response handle_http(const http::Request& request);

 private:
  void authorize(const std::string& auth_token) const;

  store::Store& store_;
  pid::PidService& pids_;
  SwordConfig config_;
};

// Token from an "Authorization: Bearer <token>" header; empty if absent.
std::string bearer_token(const http::Request& request);

}  // namespace lago::sword
