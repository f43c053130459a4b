// The only translation unit that includes cpp-httplib.
#include <strings.h>
#include <sys/socket.h>

#include <httplib.h>

#include "lago/common/error.hpp"
#include "lago/http/http.hpp"

namespace lago::http {

Response HttpTransport::send(const std::string& base_url, const Request& request) {
  const auto url = Url::parse(base_url);
  httplib::Client client(url.host, url.port);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  client.set_url_encode(false);

  // Request paths are decoded text; encode each segment for the wire.
  std::string target;
  const std::string raw = url.path + request.path;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const auto slash = raw.find('/', start);
    const auto end = slash == std::string::npos ? raw.size() : slash;
    target += url_encode(std::string_view(raw).substr(start, end - start));
    if (slash == std::string::npos) break;
    target += '/';
    start = slash + 1;
  }
  if (target.empty()) target = "/";
  if (!request.query.empty()) target += "?" + build_query(request.query);

  httplib::Headers headers;
  std::string content_type = "application/octet-stream";
  for (const auto& [k, v] : request.headers) {
    if (::strcasecmp(k.c_str(), "Content-Type") == 0)
      content_type = v;
    else
      headers.emplace(k, v);
  }

  httplib::Result res;
  if (request.method == "GET")
    res = client.Get(target, headers);
  else if (request.method == "POST")
    res = client.Post(target, headers, request.body, content_type);
  else if (request.method == "PUT")
    res = client.Put(target, headers, request.body, content_type);
  else if (request.method == "DELETE")
    res = client.Delete(target, headers);
  else
    throw Error(ErrorCode::TransportError, "unsupported method " + request.method);

  if (!res) throw Error(ErrorCode::TransportError, url.origin() + ": " + httplib::to_string(res.error()));

  Response out;
  out.status = res->status;
  out.body = res->body;
  for (const auto& [k, v] : res->headers) out.headers[k] = v;
  return out;
}

struct Server::Impl {
  Handler handler;
  httplib::Server server;

  explicit Impl(Handler h) : handler(std::move(h)) {
    const auto adapt = [this](const httplib::Request& in, httplib::Response& out) {
      Request req;
      req.method = in.method;
      req.path = in.path;
      for (const auto& [k, v] : in.params) req.query.emplace_back(k, v);
      for (const auto& [k, v] : in.headers) req.headers[k] = v;
      req.body = in.body;
      Response resp;
      try {
        resp = handler(req);
      } catch (const std::exception& e) {
        resp = text_response(500, "text/plain; charset=UTF-8", std::string("internal error: ") + e.what());
      }
      out.status = resp.status;
      std::string content_type = "application/octet-stream";
      for (const auto& [k, v] : resp.headers) {
        if (::strcasecmp(k.c_str(), "Content-Type") == 0)
          content_type = v;
        else
          out.set_header(k, v);
      }
      out.set_content(resp.body, content_type);
    };
    // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which lets a
    // second node silently share a port that is already in use.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server.Get(".*", adapt);
    server.Post(".*", adapt);
    server.Put(".*", adapt);
    server.Delete(".*", adapt);
  }
};

Server::Server(Handler handler) : impl_(std::make_unique<Impl>(std::move(handler))) {}

Server::~Server() { impl_->server.stop(); }

void Server::bind(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port), std::to_string(port));
}

int Server::bind_any(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw Error(ErrorCode::IoError, "cannot bind an ephemeral port on " + host, host);
  return port;
}

void Server::listen() { impl_->server.listen_after_bind(); }

void Server::stop() { impl_->server.stop(); }

}  // namespace lago::http
