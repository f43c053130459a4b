#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <stop_token>

#include "lago/common/time.hpp"

namespace lago {

// Time source for everything that stamps, expires, sleeps, or backs off.
// Tests substitute FakeClock so retry and scheduling behavior runs instantly.
class Clock {
 public:
  using time_point = std::chrono::system_clock::time_point;

  virtual ~Clock() = default;

  virtual time_point now() const = 0;

  // Returns false if the stop token fired before the full duration elapsed.
  virtual bool sleep_for(std::chrono::milliseconds d, std::stop_token stop = {}) = 0;

  Timestamp now_seconds() const { return std::chrono::floor<std::chrono::seconds>(now()); }
};

class SystemClock final : public Clock {
 public:
  time_point now() const override { return std::chrono::system_clock::now(); }
  bool sleep_for(std::chrono::milliseconds d, std::stop_token stop = {}) override;

  static SystemClock& instance();

 private:
  std::mutex mu_;
  std::condition_variable_any cv_;
};

// Virtual time: sleeping advances the clock immediately.
class FakeClock final : public Clock {
 public:
  explicit FakeClock(time_point start = time_point{std::chrono::sys_days{std::chrono::year{2024} / 1 / 1}})
      : now_(start.time_since_epoch().count()) {}

  time_point now() const override { return time_point{time_point::duration{now_.load()}}; }

  bool sleep_for(std::chrono::milliseconds d, std::stop_token stop = {}) override {
    if (stop.stop_requested()) return false;
    advance(d);
    ++sleeps_;
    return true;
  }

  void advance(std::chrono::milliseconds d) {
    now_ += std::chrono::duration_cast<time_point::duration>(d).count();
  }
  void set(time_point t) { now_ = t.time_since_epoch().count(); }
  std::size_t sleep_count() const { return sleeps_.load(); }

 private:
  std::atomic<time_point::rep> now_;
  std::atomic<std::size_t> sleeps_{0};
};

}  // namespace lago
