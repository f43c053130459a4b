#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/federation/node.hpp"
#include "lago/http/http.hpp"
#include "lago/metadata/record.hpp"

namespace lago::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// A record that satisfies the built-in profile; `n` varies title and values.
metadata::MetadataRecord valid_record(std::size_t n);
metadata::MetadataRecord random_record(std::mt19937_64& rng, std::size_t n);
std::string random_bytes(std::mt19937_64& rng, std::size_t max_len);

inline constexpr std::string_view kToken = "deposit-secret";
inline constexpr std::string_view kPidPrefix = "20.500.0001";
inline constexpr std::string_view kCollection = "data";

std::string node_url(const std::string& name);

federation::NodeConfig node_config(const std::string& name, const std::filesystem::path& data_dir,
                                   std::size_t page_size = 100);

// In-process node reachable on a loopback transport at node_url(name).
struct TestNode {
  TestNode(const std::string& name, const std::filesystem::path& data_dir, Clock& clock,
           http::LoopbackTransport& net, std::size_t page_size = 100,
           std::vector<federation::PeerConfig> peers = {});

  std::string url;
  std::unique_ptr<federation::Node> node;

  store::Store& store() { return node->store(); }
};

// Every problem found checking `xml` against the OAI-PMH 2.0 response schema
// (structure, element order, enumerations, lexical forms). Empty when valid.
std::vector<std::string> oai_schema_problems(const std::string& xml);

// SHA-256 over (relative path, content) pairs of every file, in path order.
std::string tree_hash(const std::filesystem::path& root);

}  // namespace lago::testing
