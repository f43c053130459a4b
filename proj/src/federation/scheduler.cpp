#include "lago/federation/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace lago::federation {

std::chrono::milliseconds next_gap(std::chrono::seconds interval, std::size_t consecutive_failures, double unit_random,
                                   const SchedulerOptions& options) {
  double base = static_cast<double>(std::chrono::duration_cast<std::chrono::milliseconds>(interval).count());
  const double cap = static_cast<double>(std::chrono::duration_cast<std::chrono::milliseconds>(options.max_interval).count());
  for (std::size_t i = 0; i < consecutive_failures && base < cap; ++i) base *= 2;
  base = std::min(base, cap);
  const double factor = consecutive_failures == 0 ? 1.0 + options.jitter * (2.0 * unit_random - 1.0)
                                                  : 1.0 + options.jitter * unit_random;
  return std::chrono::milliseconds{static_cast<std::int64_t>(std::llround(base * factor))};
}

Scheduler::Scheduler(std::vector<PeerConfig> peers, SyncFn sync, Clock& clock, SchedulerOptions options)
    : sync_(std::move(sync)), clock_(clock), options_(options), rng_(options.seed) {
  const auto now = clock_.now();
  for (auto& p : peers) slots_.push_back(Slot{std::move(p), now, 0});
}

double Scheduler::unit_random() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

std::vector<SyncReport> Scheduler::run_pending() {
  std::vector<std::size_t> due;
  {
    std::lock_guard lock(mu_);
    const auto now = clock_.now();
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].due <= now) due.push_back(i);
  }
  std::vector<std::future<SyncReport>> running;
  for (auto i : due) {
    const auto peer = slots_[i].peer;
    running.push_back(std::async(std::launch::async, [this, peer] {
      try {
        return sync_(peer);
      } catch (const std::exception& e) {
        SyncReport r;
        r.peer = peer.name;
        r.ok = false;
        r.error = e.what();
        return r;
      }
    }));
  }
  std::vector<SyncReport> reports;
  for (auto& f : running) reports.push_back(f.get());

  std::lock_guard lock(mu_);
  const auto now = clock_.now();
  for (std::size_t k = 0; k < due.size(); ++k) {
    auto& slot = slots_[due[k]];
    slot.failures = reports[k].ok ? 0 : slot.failures + 1;
    slot.due = now + next_gap(slot.peer.interval, slot.failures, unit_random(), options_);
    history_.push_back(ScheduledRun{slot.peer.name, now, reports[k].ok});
  }
  return reports;
}

void Scheduler::run(std::stop_token stop, std::optional<Clock::time_point> until) {
  while (!stop.stop_requested()) {
    Clock::time_point earliest;
    {
      std::lock_guard lock(mu_);
      if (slots_.empty()) {
        if (until) return;
        clock_.sleep_for(std::chrono::hours{1}, stop);
        continue;
      }
      earliest = std::min_element(slots_.begin(), slots_.end(), [](const Slot& a, const Slot& b) {
                   return a.due < b.due;
                 })->due;
    }
    if (until && earliest > *until) return;
    const auto now = clock_.now();
    if (earliest > now) {
      const auto wait = std::chrono::ceil<std::chrono::milliseconds>(earliest - now);
      if (!clock_.sleep_for(wait, stop)) return;
    }
    run_pending();
  }
}

std::optional<Clock::time_point> Scheduler::next_due(const std::string& peer) const {
  std::lock_guard lock(mu_);
  for (const auto& s : slots_)
    if (s.peer.name == peer) return s.due;
  return std::nullopt;
}

std::size_t Scheduler::consecutive_failures(const std::string& peer) const {
  std::lock_guard lock(mu_);
  for (const auto& s : slots_)
    if (s.peer.name == peer) return s.failures;
  return 0;
}

std::vector<ScheduledRun> Scheduler::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

}  // namespace lago::federation
