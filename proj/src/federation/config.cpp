#include "lago/federation/config.hpp"

#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"
#include "lago/http/http.hpp"
#include "lago/pid/handle.hpp"

namespace lago::federation {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& message) {
  throw Error(ErrorCode::ConfigError, key + ": " + message, key);
}

std::string str(const json& j, const std::string& key, const std::string& path, bool required,
                std::string fallback = {}) {
  if (!j.contains(key)) {
    if (required) bad(path + key, "is required");
    return fallback;
  }
  if (!j[key].is_string()) bad(path + key, "must be a string");
  return j[key].get<std::string>();
}

bool boolean(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) bad(key, "must be true or false");
  return j[key].get<bool>();
}

std::int64_t positive(const json& j, const std::string& key, const std::string& path, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer() || j[key].get<std::int64_t>() <= 0) bad(path + key, "must be a positive integer");
  return j[key].get<std::int64_t>();
}

std::pair<std::string, int> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) bad("httpBind", "must be host:port");
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(bind.substr(colon + 1), &used);
    if (used != bind.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    bad("httpBind", "port is not a number");
  }
  if (port < 0 || port > 65535) bad("httpBind", "port out of range");
  return {bind.substr(0, colon), port};
}

}  // namespace

std::string NodeConfig::bind_host() const { return split_bind(http_bind).first; }
int NodeConfig::bind_port() const { return split_bind(http_bind).second; }

NodeConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "top level must be an object");

  NodeConfig c;
  c.node_name = str(j, "nodeName", "", true);
  if (!is_token(c.node_name) || c.node_name.find(':') != std::string::npos)
    bad("nodeName", "must match [A-Za-z0-9._-]+");
  c.http_bind = str(j, "httpBind", "", false, c.http_bind);
  split_bind(c.http_bind);
  c.public_url = str(j, "publicUrl", "", false, "http://" + c.http_bind);
  while (!c.public_url.empty() && c.public_url.back() == '/') c.public_url.pop_back();
  try {
    http::Url::parse(c.public_url);
  } catch (const Error& e) {
    bad("publicUrl", e.message());
  }
  c.pid_prefix = str(j, "pidPrefix", "", true);
  if (!pid::is_handle_prefix(c.pid_prefix)) bad("pidPrefix", "must match [0-9.]+");
  c.deposit_token = str(j, "depositToken", "", true);
  if (c.deposit_token.empty()) bad("depositToken", "must not be empty");
  c.page_size = static_cast<std::size_t>(positive(j, "pageSize", "", 100));
  const std::filesystem::path data_dir = str(j, "dataDir", "", true);
  c.data_dir = data_dir.is_absolute() || base_dir.empty() ? data_dir : base_dir / data_dir;
  c.transitive = boolean(j, "transitive", false);
  c.mirror_content = boolean(j, "mirrorContent", false);
  c.token_secret = str(j, "tokenSecret", "", false);
  const std::filesystem::path profile = str(j, "profile", "", false);
  if (!profile.empty()) c.profile_path = profile.is_absolute() || base_dir.empty() ? profile : base_dir / profile;

  std::set<std::string> ids;
  if (j.contains("collections")) {
    if (!j["collections"].is_array()) bad("collections", "must be an array");
    for (std::size_t i = 0; i < j["collections"].size(); ++i) {
      const auto& cj = j["collections"][i];
      const auto path = "collections[" + std::to_string(i) + "].";
      if (!cj.is_object()) bad(path, "must be an object");
      CollectionConfig col;
      col.id = str(cj, "id", path, true);
      if (!is_token(col.id)) bad(path + "id", "must match [A-Za-z0-9._-]+");
      col.name = str(cj, "name", path, false, col.id);
      col.community = str(cj, "community", path, false, c.node_name);
      if (!is_token(col.community)) bad(path + "community", "must match [A-Za-z0-9._-]+");
      if (!ids.insert(col.id).second) bad(path + "id", "duplicate collection id");
      c.collections.push_back(std::move(col));
    }
  }

  std::set<std::string> peer_names;
  if (j.contains("peers")) {
    if (!j["peers"].is_array()) bad("peers", "must be an array");
    for (std::size_t i = 0; i < j["peers"].size(); ++i) {
      const auto& pj = j["peers"][i];
      const auto path = "peers[" + std::to_string(i) + "].";
      if (!pj.is_object()) bad(path, "must be an object");
      PeerConfig p;
      p.name = str(pj, "peerName", path, true);
      if (!is_token(p.name) || p.name.find(':') != std::string::npos) bad(path + "peerName", "must match [A-Za-z0-9._-]+");
      if (p.name == c.node_name) bad(path + "peerName", "must differ from nodeName");
      if (ids.count(p.name)) bad(path + "peerName", "clashes with a local collection id");
      if (!peer_names.insert(p.name).second) bad(path + "peerName", "duplicate peer");
      p.base_url = str(pj, "baseUrl", path, true);
      while (!p.base_url.empty() && p.base_url.back() == '/') p.base_url.pop_back();
      try {
        http::Url::parse(p.base_url);
      } catch (const Error& e) {
        bad(path + "baseUrl", e.message());
      }
      if (pj.contains("sets")) {
        if (!pj["sets"].is_array()) bad(path + "sets", "must be an array of setSpecs");
        std::vector<std::string> sets;
        for (const auto& s : pj["sets"]) {
          if (!s.is_string()) bad(path + "sets", "must be an array of setSpecs");
          sets.push_back(s.get<std::string>());
        }
        p.sets = std::move(sets);
      }
      p.interval = std::chrono::seconds{positive(pj, "intervalSeconds", path, kDefaultInterval.count())};
      c.peers.push_back(std::move(p));
    }
  }
  return c;
}

NodeConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.message(), path.string());
  }
  return parse_config(text, path.parent_path());
}

std::filesystem::path config_path(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(std::string(kConfigEnv).c_str()); env && *env) return env;
  throw Error(ErrorCode::ConfigError, "no config: pass --config or set " + std::string(kConfigEnv));
}

}  // namespace lago::federation
