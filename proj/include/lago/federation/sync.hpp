#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "lago/common/clock.hpp"
#include "lago/federation/config.hpp"
#include "lago/http/http.hpp"
#include "lago/store/store.hpp"

namespace lago::federation {

struct SyncReport {
  std::string peer;
  std::size_t received = 0;
  std::size_t created = 0;
  std::size_t updated = 0;
  std::size_t deleted = 0;
  std::size_t skipped_foreign = 0;
  std::size_t unchanged = 0;
  Timestamp started_at{};
  std::chrono::milliseconds duration{0};
  bool ok = false;
  std::string error;
  // Checkpoint in force after this run.
  std::optional<Timestamp> checkpoint;
};

struct PeerState {
  // Every record of the peer stamped at or before this instant is applied.
  std::optional<Timestamp> last_checkpoint;
  std::optional<SyncReport> last_result;
  std::size_t consecutive_failures = 0;
};

// Per-peer sync state, persisted as JSON after every change.
class SyncState {
 public:
  // In memory only when `path` is empty.
  explicit SyncState(std::filesystem::path path = {});

  PeerState get(const std::string& peer) const;
  std::map<std::string, PeerState> all() const;
  // Records a finished run. The checkpoint only moves forward.
  void record(const SyncReport& report);

 private:
  void save() const;

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, PeerState> peers_;
};

struct SyncOptions {
  bool transitive = false;
  bool mirror_content = false;
  http::RetryPolicy retry;
};

// Test hook: called with a point name ("record", "commit") during a sync;
// throwing aborts the run there.
using SyncFaultHook = std::function<void(std::string_view)>;

// One incremental pull from `peer` into the mirror collection named after it.
// Never throws for peer or protocol failures: they are reported with ok=false
// and leave the checkpoint unchanged.
SyncReport sync_once(store::Store& store, http::Transport& transport, Clock& clock, const PeerConfig& peer,
                     SyncState& state, const SyncOptions& options = {}, const SyncFaultHook& fault = {});

// The mirror collection for a peer, created if needed.
store::Collection ensure_mirror_collection(store::Store& store, const std::string& peer);

std::string report_to_json(const SyncReport& report);

}  // namespace lago::federation
