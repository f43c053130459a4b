#include "lago/http/http.hpp"

#include <strings.h>

#include "lago/common/error.hpp"

namespace lago::http {

bool CaseInsensitiveLess::operator()(const std::string& a, const std::string& b) const {
  return ::strcasecmp(a.c_str(), b.c_str()) < 0;
}

std::string Request::header(const std::string& name) const {
  auto it = headers.find(name);
  return it == headers.end() ? std::string{} : it->second;
}

std::string Response::header(const std::string& name) const {
  auto it = headers.find(name);
  return it == headers.end() ? std::string{} : it->second;
}

Response text_response(int status, std::string content_type, std::string body) {
  Response r;
  r.status = status;
  r.headers["Content-Type"] = std::move(content_type);
  r.body = std::move(body);
  return r;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

std::string url_decode(std::string_view s) {
  const auto hexval = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hexval(s[i + 1]) >= 0 && hexval(s[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hexval(s[i + 1]) * 16 + hexval(s[i + 2])));
      i += 2;
    } else if (s[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

QueryParams parse_query(std::string_view query) {
  QueryParams out;
  while (!query.empty()) {
    auto amp = query.find('&');
    auto part = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string_view::npos)
      out.emplace_back(url_decode(part), std::string{});
    else
      out.emplace_back(url_decode(part.substr(0, eq)), url_decode(part.substr(eq + 1)));
  }
  return out;
}

std::string build_query(const QueryParams& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += '&';
    out += url_encode(k);
    out += '=';
    out += url_encode(v);
  }
  return out;
}

Url Url::parse(std::string_view text) {
  Url u;
  auto sep = text.find("://");
  if (sep == std::string_view::npos) throw Error(ErrorCode::TransportError, "not an absolute URL: " + std::string(text));
  u.scheme = std::string(text.substr(0, sep));
  if (u.scheme != "http") throw Error(ErrorCode::TransportError, "unsupported URL scheme: " + u.scheme);
  auto rest = text.substr(sep + 3);
  auto slash = rest.find('/');
  auto hostport = rest.substr(0, slash);
  u.path = slash == std::string_view::npos ? std::string{} : std::string(rest.substr(slash));
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  auto colon = hostport.rfind(':');
  if (colon != std::string_view::npos) {
    u.host = std::string(hostport.substr(0, colon));
    try {
      u.port = std::stoi(std::string(hostport.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::TransportError, "bad port in URL: " + std::string(text));
    }
  } else {
    u.host = std::string(hostport);
  }
  if (u.host.empty()) throw Error(ErrorCode::TransportError, "missing host in URL: " + std::string(text));
  return u;
}

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

void LoopbackTransport::attach(const std::string& base_url, Handler handler) {
  std::lock_guard lock(mu_);
  handlers_[Url::parse(base_url).origin()] = std::move(handler);
}

void LoopbackTransport::set_down(const std::string& base_url, bool down) {
  std::lock_guard lock(mu_);
  down_[Url::parse(base_url).origin()] = down;
}

std::size_t LoopbackTransport::request_count() const {
  std::lock_guard lock(mu_);
  return requests_;
}

Response LoopbackTransport::send(const std::string& base_url, const Request& request) {
  const auto url = Url::parse(base_url);
  Handler handler;
  {
    std::lock_guard lock(mu_);
    ++requests_;
    auto it = handlers_.find(url.origin());
    if (it == handlers_.end() || down_[url.origin()])
      throw Error(ErrorCode::TransportError, "connection refused: " + url.origin());
    handler = it->second;
  }
  Request routed = request;
  routed.path = url.path + request.path;
  return handler(routed);
}

Response send_with_retry(Transport& transport, Clock& clock, const std::string& base_url, const Request& request,
                         const RetryPolicy& policy) {
  auto backoff = policy.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      return transport.send(base_url, request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TransportError || attempt >= policy.retries) throw;
    }
    clock.sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace lago::http
