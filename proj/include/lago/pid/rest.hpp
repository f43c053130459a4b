#pragma once

#include <string>

#include "lago/http/http.hpp"
#include "lago/pid/registry.hpp"

namespace lago::pid {

// REST surface under /pid/handles. Resolution is public; mint, update and
// remove require `Authorization: Bearer <token>`.
//
//   POST   /pid/handles/<prefix>              {"suffix"?, "values": [...]}  -> 201
//   GET    /pid/handles/<prefix>/<suffix...>  -> 200, X-Derived: true|false
//   PUT    /pid/handles/<prefix>/<suffix...>  {"values": [...]}             -> 200
//   DELETE /pid/handles/<prefix>/<suffix...>  -> 204
http::Response handle_pid_request(PidService& service, const std::string& token, const http::Request& request);

// PidService backed by a remote node's REST surface.
class RestPidClient final : public PidService {
 public:
  RestPidClient(http::Transport& transport, std::string base_url, std::string prefix, std::string token);

  const std::string& prefix() const override { return prefix_; }
  Handle mint(std::optional<std::string> suffix, std::vector<HandleValue> values) override;
  Resolution resolve(std::string_view handle_text) const override;
  Handle update(std::string_view handle_text, std::vector<HandleValue> values) override;
  void remove(std::string_view handle_text) override;
  // Not exposed remotely; always 0.
  std::size_t size() const override { return 0; }

 private:
  http::Response call(http::Request request) const;

  http::Transport& transport_;
  std::string base_url_;
  std::string prefix_;
  std::string token_;
};

}  // namespace lago::pid
