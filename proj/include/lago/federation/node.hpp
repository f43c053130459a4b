#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/federation/config.hpp"
#include "lago/federation/scheduler.hpp"
#include "lago/federation/sync.hpp"
#include "lago/http/http.hpp"
#include "lago/oaipmh/provider.hpp"
#include "lago/pid/registry.hpp"
#include "lago/store/store.hpp"
#include "lago/sword/server.hpp"

namespace lago::federation {

struct NodeOptions {
  // fsync catalog, PID log and receipts; tests turn this off for speed.
  bool durable = true;
  SchedulerOptions scheduler;
  http::RetryPolicy retry;
};

// Line-delimited JSON operational events.
class OpsLog {
 public:
  explicit OpsLog(std::filesystem::path path) : path_(std::move(path)) {}
  void write(Clock& clock, std::string_view event, const std::string& json_fields);

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

// One repository node: store, PID registry, OAI provider, SWORD server,
// content endpoint and peer sync, behind a single request router.
//
//   GET|POST /oai                          OAI-PMH
//   GET  /sword/servicedocument            SWORD service document
//   POST /sword/deposit/<collectionId>     SWORD deposit
//   *    /pid/handles/...                  PID REST
//   GET  /items/<uuid>                     item JSON
//   GET  /items/<uuid>/bitstreams/<name>   content, with Content-MD5
//   GET  /healthz                          status JSON
class Node {
 public:
  // `peers` carries all outbound HTTP (harvests and content fetches).
  Node(NodeConfig config, Clock& clock, http::Transport& peers, NodeOptions options = {});
  ~Node();

  http::Response handle(const http::Request& request);

  SyncReport sync_peer(const PeerConfig& peer);
  // Syncs every configured peer concurrently.
  std::vector<SyncReport> sync_all();

  Scheduler& scheduler() { return *scheduler_; }
  store::Store& store() { return *store_; }
  pid::HandleRegistry& pids() { return *pids_; }
  sword::SwordServer& sword() { return *sword_; }
  const oaipmh::Provider& provider() const { return *provider_; }
  SyncState& sync_state() { return *sync_state_; }
  const NodeConfig& config() const { return config_; }

  std::string healthz_json() const;

  // Test hook for sync runs.
  void set_sync_fault_hook(SyncFaultHook hook) { sync_fault_ = std::move(hook); }

 private:
  http::Response serve_item(const std::string& rest) const;

  NodeConfig config_;
  Clock& clock_;
  http::Transport& peers_;
  NodeOptions options_;
  std::unique_ptr<store::Store> store_;
  std::unique_ptr<pid::HandleRegistry> pids_;
  std::unique_ptr<oaipmh::Provider> provider_;
  std::unique_ptr<sword::SwordServer> sword_;
  std::unique_ptr<SyncState> sync_state_;
  std::unique_ptr<Scheduler> scheduler_;
  std::unique_ptr<OpsLog> ops_;
  SyncFaultHook sync_fault_;
};

}  // namespace lago::federation
