#include "lago/pid/rest.hpp"

#include <nlohmann/json.hpp>

#include "lago/common/digest.hpp"
#include "lago/common/error.hpp"

namespace lago::pid {

using nlohmann::json;

namespace {

constexpr std::string_view kRoot = "/pid/handles/";

json values_to_json(const std::vector<HandleValue>& values) {
  json out = json::array();
  for (const auto& v : values)
    out.push_back({{"index", v.index}, {"type", v.type}, {"data", v.data}, {"timestamp", format_datestamp(v.timestamp)}});
  return out;
}

std::vector<HandleValue> values_from_json(const json& j) {
  std::vector<HandleValue> out;
  for (const auto& v : j) {
    HandleValue hv;
    hv.index = v.value("index", 0);
    hv.type = v.at("type").get<std::string>();
    hv.data = v.at("data").get<std::string>();
    if (v.contains("timestamp")) hv.timestamp = parse_datestamp(v["timestamp"].get<std::string>()).value_or(Timestamp{});
    out.push_back(std::move(hv));
  }
  return out;
}

json handle_to_json(const Handle& h) {
  return json{{"handle", h.text()}, {"values", values_to_json(h.values)}};
}

http::Response json_response(int status, const json& body) {
  return http::text_response(status, "application/json", body.dump());
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::SuffixTaken: return 409;
    case ErrorCode::Unauthorized: return 401;
    default: return 400;
  }
}

http::Response error_response(const Error& e) {
  return json_response(status_for(e.code()), json{{"error", to_string(e.code())}, {"message", e.what()}});
}

bool authorized(const std::string& token, const http::Request& request) {
  return !token.empty() && equal_constant_time(request.header("Authorization"), "Bearer " + token);
}

}  // namespace

http::Response handle_pid_request(PidService& service, const std::string& token, const http::Request& request) {
  try {
    if (request.path.rfind(kRoot, 0) != 0) throw Error(ErrorCode::NotFound, "no such resource");
    const std::string tail = request.path.substr(kRoot.size());
    const bool is_collection = tail.find('/') == std::string::npos;

    if (request.method == "GET" && !is_collection) {
      const auto r = service.resolve(tail);
      auto resp = json_response(200, json{{"handle", tail}, {"values", values_to_json(r.values)}, {"derived", r.derived}});
      resp.headers["X-Derived"] = r.derived ? "true" : "false";
      return resp;
    }
    if (!authorized(token, request)) throw Error(ErrorCode::Unauthorized, "bearer token required");

    json body;
    if (!request.body.empty()) {
      try {
        body = json::parse(request.body);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidValue, std::string("request body is not JSON: ") + e.what());
      }
    }
    try {
      if (request.method == "POST" && is_collection) {
        if (tail != service.prefix()) throw Error(ErrorCode::NotFound, "this service mints under " + service.prefix());
        std::optional<std::string> suffix;
        if (body.contains("suffix") && !body["suffix"].is_null()) suffix = body["suffix"].get<std::string>();
        const auto h = service.mint(suffix, values_from_json(body.value("values", json::array())));
        return json_response(201, handle_to_json(h));
      }
      if (request.method == "PUT" && !is_collection) {
        const auto h = service.update(tail, values_from_json(body.value("values", json::array())));
        return json_response(200, handle_to_json(h));
      }
      if (request.method == "DELETE" && !is_collection) {
        service.remove(tail);
        return http::text_response(204, "application/json", "");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidValue, std::string("malformed request body: ") + e.what());
    }
    return json_response(405, json{{"error", "MethodNotAllowed"}, {"message", request.method + " " + request.path}});
  } catch (const Error& e) {
    return error_response(e);
  }
}

RestPidClient::RestPidClient(http::Transport& transport, std::string base_url, std::string prefix, std::string token)
    : transport_(transport), base_url_(std::move(base_url)), prefix_(std::move(prefix)), token_(std::move(token)) {}

http::Response RestPidClient::call(http::Request request) const {
  request.headers["Authorization"] = "Bearer " + token_;
  request.headers["Content-Type"] = "application/json";
  auto resp = transport_.send(base_url_, request);
  if (resp.status >= 400) {
    ErrorCode code = ErrorCode::ProtocolError;
    std::string message = "HTTP " + std::to_string(resp.status);
    try {
      const auto j = json::parse(resp.body);
      if (!parse_error_code(j.value("error", ""), code)) code = ErrorCode::ProtocolError;
      message = j.value("message", message);
    } catch (const json::exception&) {
    }
    throw Error(code, message);
  }
  return resp;
}

Handle RestPidClient::mint(std::optional<std::string> suffix, std::vector<HandleValue> values) {
  json body{{"values", values_to_json(values)}};
  if (suffix) body["suffix"] = *suffix;
  const auto resp = call(http::Request{"POST", std::string(kRoot) + prefix_, {}, {}, body.dump()});
  const auto j = json::parse(resp.body);
  const auto name = HandleName::parse(j.at("handle").get<std::string>());
  return Handle{name.prefix, name.suffix(), values_from_json(j.at("values"))};
}

Resolution RestPidClient::resolve(std::string_view handle_text) const {
  const auto resp = call(http::Request{"GET", std::string(kRoot) + std::string(handle_text), {}, {}, {}});
  const auto j = json::parse(resp.body);
  return Resolution{values_from_json(j.at("values")), resp.header("X-Derived") == "true", {}};
}

Handle RestPidClient::update(std::string_view handle_text, std::vector<HandleValue> values) {
  const auto resp = call(http::Request{"PUT", std::string(kRoot) + std::string(handle_text), {}, {},
                                       json{{"values", values_to_json(values)}}.dump()});
  const auto j = json::parse(resp.body);
  const auto name = HandleName::parse(j.at("handle").get<std::string>());
  return Handle{name.prefix, name.suffix(), values_from_json(j.at("values"))};
}

void RestPidClient::remove(std::string_view handle_text) {
  call(http::Request{"DELETE", std::string(kRoot) + std::string(handle_text), {}, {}, {}});
}

}  // namespace lago::pid
