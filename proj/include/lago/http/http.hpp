#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lago/common/clock.hpp"

namespace lago::http {

struct CaseInsensitiveLess {
  bool operator()(const std::string& a, const std::string& b) const;
};

using Headers = std::map<std::string, std::string, CaseInsensitiveLess>;
using QueryParams = std::vector<std::pair<std::string, std::string>>;

struct Request {
  std::string method = "GET";
  std::string path = "/";
  QueryParams query;
  Headers headers;
  std::string body;

  std::string header(const std::string& name) const;
};

struct Response {
  int status = 200;
  Headers headers;
  std::string body;

  std::string header(const std::string& name) const;
};

Response text_response(int status, std::string content_type, std::string body);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);
QueryParams parse_query(std::string_view query);
std::string build_query(const QueryParams& params);

struct Url {
  std::string scheme;
  std::string host;
  int port = 80;
  std::string path;  // without trailing slash; may be empty

  // Throws Error(TransportError) for anything that is not http://host[:port][/path].
  static Url parse(std::string_view text);
  std::string origin() const;
};

// Synchronous request/response exchange against a base URL. Throws
// Error(TransportError) when no HTTP response was obtained; any status code
// counts as a response.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response send(const std::string& base_url, const Request& request) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds{30}) : timeout_(timeout) {}
  Response send(const std::string& base_url, const Request& request) override;

 private:
  std::chrono::seconds timeout_;
};

using Handler = std::function<Response(const Request&)>;

// Routes requests to in-process handlers keyed by base URL origin. Unknown
// origins and handlers marked down behave like unreachable hosts.
class LoopbackTransport final : public Transport {
 public:
  void attach(const std::string& base_url, Handler handler);
  void set_down(const std::string& base_url, bool down);
  Response send(const std::string& base_url, const Request& request) override;
  std::size_t request_count() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Handler> handlers_;
  std::map<std::string, bool> down_;
  std::size_t requests_ = 0;
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
};

// Sends, retrying only transport failures with doubling backoff. A received
// response (whatever its status) is returned as-is and never retried.
Response send_with_retry(Transport& transport, Clock& clock, const std::string& base_url, const Request& request,
                         const RetryPolicy& policy = {});

class Server {
 public:
  explicit Server(Handler handler);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Throws Error(IoError) naming host:port when the address cannot be bound.
  void bind(const std::string& host, int port);
  // Binds an ephemeral port and returns it.
  int bind_any(const std::string& host);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lago::http
