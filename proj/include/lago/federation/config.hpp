#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lago::federation {

inline constexpr std::string_view kConfigEnv = "LAGO_NODE_CONFIG";
inline constexpr std::chrono::seconds kDefaultInterval{900};

struct PeerConfig {
  std::string name;
  // Peer root URL, e.g. http://host:port
  std::string base_url;
  // Sets to harvest; default: every local:* set the peer lists.
  std::optional<std::vector<std::string>> sets;
  std::chrono::seconds interval = kDefaultInterval;
};

struct CollectionConfig {
  std::string id;
  std::string name;
  std::string community;
};

struct NodeConfig {
  std::string node_name;
  std::string http_bind = "127.0.0.1:8080";
  // Root URL advertised in OAI baseURL, receipts and PIDs; default http://<httpBind>.
  std::string public_url;
  std::string pid_prefix;
  std::string deposit_token;
  std::size_t page_size = 100;
  std::filesystem::path data_dir;
  // Also harvest peers' mirror:* sets.
  bool transitive = false;
  // Copy bitstreams along with metadata.
  bool mirror_content = false;
  // Resumption token key; generated under dataDir when empty.
  std::string token_secret;
  // Metadata profile file; the built-in LAGO profile when empty.
  std::filesystem::path profile_path;
  std::vector<CollectionConfig> collections;
  std::vector<PeerConfig> peers;

  std::string bind_host() const;
  int bind_port() const;
};

// Throws Error(ConfigError). Relative paths resolve against `base_dir`.
NodeConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
NodeConfig load_config(const std::filesystem::path& path);

// --config value, else $LAGO_NODE_CONFIG; throws ConfigError if neither is set.
std::filesystem::path config_path(const std::optional<std::string>& flag);

}  // namespace lago::federation
