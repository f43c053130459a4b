#include "lago/sword/client.hpp"

#include "lago/common/digest.hpp"
#include "lago/common/files.hpp"

namespace lago::sword {

DepositReceipt client_deposit_bytes(http::Transport& transport, Clock& clock, const std::string& endpoint,
                                    const std::string& collection_id, const std::string& zip_bytes,
                                    const std::string& token, const ClientOptions& options) {
  http::Request request;
  request.method = "POST";
  request.path = "/sword/deposit/" + collection_id;
  request.headers["Content-Type"] = std::string(kZipMediaType);
  request.headers["X-Packaging"] = std::string(kPackaging);
  request.headers["Content-MD5"] = md5_hex(zip_bytes);
  request.headers["Authorization"] = "Bearer " + token;
  if (options.slug) request.headers["Slug"] = *options.slug;
  request.body = zip_bytes;
  const auto response = http::send_with_retry(transport, clock, endpoint, request, options.retry);
  if (response.status != 201) throw_error_document(response.body, response.status);
  return parse_receipt(response.body);
}

DepositReceipt client_deposit(http::Transport& transport, Clock& clock, const std::string& endpoint,
                              const std::string& collection_id, const std::filesystem::path& package_path,
                              const std::string& token, const ClientOptions& options) {
  return client_deposit_bytes(transport, clock, endpoint, collection_id, read_file(package_path), token, options);
}

ServiceDocument client_service_document(http::Transport& transport, Clock& clock, const std::string& endpoint,
                                        const std::string& token, const http::RetryPolicy& retry) {
  http::Request request;
  request.method = "GET";
  request.path = "/sword/servicedocument";
  request.headers["Authorization"] = "Bearer " + token;
  const auto response = http::send_with_retry(transport, clock, endpoint, request, retry);
  if (response.status != 200) throw_error_document(response.body, response.status);
  return parse_service_document(response.body);
}

}  // namespace lago::sword
