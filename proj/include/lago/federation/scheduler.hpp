#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <stop_token>
#include <string>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/federation/config.hpp"
#include "lago/federation/sync.hpp"

namespace lago::federation {

struct SchedulerOptions {
  double jitter = 0.10;
  std::chrono::seconds max_interval{24 * 3600};
  std::uint64_t seed = 0x1a605eedULL;
};

struct ScheduledRun {
  std::string peer;
  Clock::time_point at;
  bool ok = false;
};

// Time from one finished run of a peer to its next start: the base interval,
// doubled per consecutive failure and capped, times a jitter factor in
// [1-j, 1+j] (healthy) or [1, 1+j] (backing off, so the gap never shrinks
// below the doubled interval).
std::chrono::milliseconds next_gap(std::chrono::seconds interval, std::size_t consecutive_failures, double unit_random,
                                   const SchedulerOptions& options = {});

class Scheduler {
 public:
  using SyncFn = std::function<SyncReport(const PeerConfig&)>;

  Scheduler(std::vector<PeerConfig> peers, SyncFn sync, Clock& clock, SchedulerOptions options = {});

  // Runs every peer due now, concurrently, and waits for all of them.
  std::vector<SyncReport> run_pending();

  // Service loop. Returns when `stop` fires (after in-flight syncs finish) or
  // when the clock passes `until`.
  void run(std::stop_token stop, std::optional<Clock::time_point> until = std::nullopt);

  std::optional<Clock::time_point> next_due(const std::string& peer) const;
  std::size_t consecutive_failures(const std::string& peer) const;
  std::vector<ScheduledRun> history() const;

 private:
  struct Slot {
    PeerConfig peer;
    Clock::time_point due;
    std::size_t failures = 0;
  };

  double unit_random();

  std::vector<Slot> slots_;
  SyncFn sync_;
  Clock& clock_;
  SchedulerOptions options_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::vector<ScheduledRun> history_;
};

}  // namespace lago::federation
