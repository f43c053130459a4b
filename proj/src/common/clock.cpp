#include "lago/common/clock.hpp"

namespace lago {

bool SystemClock::sleep_for(std::chrono::milliseconds d, std::stop_token stop) {
  std::unique_lock lock(mu_);
  return !cv_.wait_for(lock, stop, d, [] { return false; }) && !stop.stop_requested();
}

SystemClock& SystemClock::instance() {
  static SystemClock clock;
  return clock;
}

}  // namespace lago
