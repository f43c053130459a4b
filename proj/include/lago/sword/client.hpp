#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lago/common/clock.hpp"
#include "lago/http/http.hpp"
#include "lago/sword/documents.hpp"

namespace lago::sword {

struct ClientOptions {
  http::RetryPolicy retry;
  std::optional<std::string> slug;
};

// Deposits zip bytes into a collection of the node at `endpoint` (its root
// URL). Transport failures are retried; a received response never is. Server
// errors are rethrown with their original code.
DepositReceipt client_deposit_bytes(http::Transport& transport, Clock& clock, const std::string& endpoint,
                                    const std::string& collection_id, const std::string& zip_bytes,
                                    const std::string& token, const ClientOptions& options = {});

DepositReceipt client_deposit(http::Transport& transport, Clock& clock, const std::string& endpoint,
                              const std::string& collection_id, const std::filesystem::path& package_path,
                              const std::string& token, const ClientOptions& options = {});

ServiceDocument client_service_document(http::Transport& transport, Clock& clock, const std::string& endpoint,
                                        const std::string& token, const http::RetryPolicy& retry = {});

}  // namespace lago::sword
