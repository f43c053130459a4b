#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/pid/handle.hpp"

namespace lago::pid {

struct Resolution {
  std::vector<HandleValue> values;
  bool derived = false;
  // Registered handle that produced the values.
  std::string source;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Client-side boundary of a PID service. The deposit path talks to this
// interface only, so a remote registry client can stand in for the local one.
class PidService {
 public:
  virtual ~PidService() = default;

  virtual const std::string& prefix() const = 0;
  // Throws SuffixTaken, EmptyValues, InvalidValue, InvalidHandle.
  virtual Handle mint(std::optional<std::string> suffix, std::vector<HandleValue> values) = 0;
  // Throws NotFound, InvalidHandle. Never mutates the registry.
  virtual Resolution resolve(std::string_view handle_text) const = 0;
  // Exact registrations only; throws NotFound otherwise.
  virtual Handle update(std::string_view handle_text, std::vector<HandleValue> values) = 0;
  virtual void remove(std::string_view handle_text) = 0;
  virtual std::size_t size() const = 0;
};

// Local Handle-style registry. Readers work on an immutable snapshot that
// writers replace wholesale, so resolution never waits on a mint. Mutations
// are persisted to <dataDir>/pid.log before they become visible.
class HandleRegistry final : public PidService {
 public:
  HandleRegistry(std::string prefix, Clock& clock, std::optional<std::filesystem::path> log_path = std::nullopt,
                 bool durable = true);

  const std::string& prefix() const override { return prefix_; }
  Handle mint(std::optional<std::string> suffix, std::vector<HandleValue> values) override;
  Resolution resolve(std::string_view handle_text) const override;
  Handle update(std::string_view handle_text, std::vector<HandleValue> values) override;
  void remove(std::string_view handle_text) override;
  std::size_t size() const override;

  std::optional<Handle> find(std::string_view handle_text) const;

 private:
  using Map = std::map<std::string, Handle>;

  std::shared_ptr<const Map> snapshot() const;
  void publish(std::shared_ptr<const Map> next);
  std::vector<HandleValue> prepare(std::vector<HandleValue> values) const;
  void load();
  void persist_put(const Handle& h);
  void persist_remove(const std::string& key);

  std::string prefix_;
  Clock& clock_;
  std::optional<std::filesystem::path> log_path_;
  bool durable_;

  std::mutex write_mu_;
  mutable std::mutex snap_mu_;
  std::shared_ptr<const Map> snapshot_;
};

}  // namespace lago::pid
