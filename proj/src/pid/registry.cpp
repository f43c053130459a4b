#include "lago/pid/registry.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"

namespace lago::pid {

using nlohmann::json;

namespace {

json to_json(const Handle& h) {
  json values = json::array();
  for (const auto& v : h.values)
    values.push_back({{"index", v.index}, {"type", v.type}, {"data", v.data}, {"timestamp", format_datestamp(v.timestamp)}});
  return json{{"prefix", h.prefix}, {"suffix", h.suffix}, {"values", values}};
}

Handle from_json(const json& j) {
  Handle h;
  h.prefix = j.at("prefix").get<std::string>();
  h.suffix = j.at("suffix").get<std::string>();
  for (const auto& v : j.at("values")) {
    auto ts = parse_datestamp(v.at("timestamp").get<std::string>());
    h.values.push_back(HandleValue{v.at("index").get<int>(), v.at("type").get<std::string>(),
                                   v.at("data").get<std::string>(), ts.value_or(Timestamp{})});
  }
  return h;
}

[[noreturn]] void not_found(std::string_view text) {
  throw Error(ErrorCode::NotFound, "handle " + std::string(text) + " is not registered", std::string(text));
}

}  // namespace

HandleRegistry::HandleRegistry(std::string prefix, Clock& clock, std::optional<std::filesystem::path> log_path,
                               bool durable)
    : prefix_(std::move(prefix)),
      clock_(clock),
      log_path_(std::move(log_path)),
      durable_(durable),
      snapshot_(std::make_shared<const Map>()) {
  if (!is_handle_prefix(prefix_)) throw Error(ErrorCode::ConfigError, "malformed handle prefix '" + prefix_ + "'");
  load();
}

void HandleRegistry::load() {
  if (!log_path_) return;
  std::ifstream in(*log_path_);
  if (!in) return;
  auto map = std::make_shared<Map>();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      const auto op = j.at("op").get<std::string>();
      if (op == "put") {
        auto h = from_json(j.at("handle"));
        (*map)[HandleName::parse(h.text()).key()] = std::move(h);
      } else if (op == "remove") {
        map->erase(j.at("key").get<std::string>());
      }
    } catch (const std::exception&) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::StorageError, "pid.log: corrupt record at line " + std::to_string(lineno));
    }
  }
  snapshot_ = std::move(map);
}

void HandleRegistry::persist_put(const Handle& h) {
  if (log_path_) append_line(*log_path_, json{{"op", "put"}, {"handle", to_json(h)}}.dump(), durable_);
}

void HandleRegistry::persist_remove(const std::string& key) {
  if (log_path_) append_line(*log_path_, json{{"op", "remove"}, {"key", key}}.dump(), durable_);
}

std::shared_ptr<const HandleRegistry::Map> HandleRegistry::snapshot() const {
  std::lock_guard lock(snap_mu_);
  return snapshot_;
}

void HandleRegistry::publish(std::shared_ptr<const Map> next) {
  std::lock_guard lock(snap_mu_);
  snapshot_ = std::move(next);
}

std::vector<HandleValue> HandleRegistry::prepare(std::vector<HandleValue> values) const {
  if (values.empty()) throw Error(ErrorCode::EmptyValues, "a handle needs at least one value");
  std::set<int> used;
  for (const auto& v : values) {
    if (v.index < 0) throw Error(ErrorCode::InvalidValue, "negative value index");
    if (v.index > 0 && !used.insert(v.index).second)
      throw Error(ErrorCode::InvalidValue, "duplicate value index " + std::to_string(v.index));
  }
  int next = 1;
  int templates = 0;
  const auto now = clock_.now_seconds();
  for (auto& v : values) {
    if (v.type.empty()) throw Error(ErrorCode::InvalidValue, "value without type");
    if (v.index == 0) {
      while (used.count(next)) ++next;
      v.index = next;
      used.insert(next);
    }
    if (v.type == kTemplateType) {
      ++templates;
      TemplateRule::parse(v.data);
    }
    v.timestamp = now;
  }
  if (templates > 1) throw Error(ErrorCode::InvalidValue, "a handle carries at most one TEMPLATE value");
  return values;
}

Handle HandleRegistry::mint(std::optional<std::string> suffix, std::vector<HandleValue> values) {
  values = prepare(std::move(values));
  std::lock_guard write(write_mu_);
  auto current = snapshot();
  Handle h;
  h.prefix = prefix_;
  if (suffix) {
    const auto name = HandleName::parse(prefix_ + "/" + *suffix);
    if (current->count(name.key())) throw Error(ErrorCode::SuffixTaken, "suffix " + *suffix + " is taken", *suffix);
    h.suffix = name.suffix();
  } else {
    do {
      h.suffix = generate_uuid();
    } while (current->count(HandleName::parse(h.text()).key()));
  }
  h.values = std::move(values);
  persist_put(h);
  auto next = std::make_shared<Map>(*current);
  (*next)[HandleName::parse(h.text()).key()] = h;
  publish(std::move(next));
  return h;
}

Resolution HandleRegistry::resolve(std::string_view handle_text) const {
  const auto name = HandleName::parse(handle_text);
  if (name.prefix != prefix_) not_found(handle_text);
  const auto map = snapshot();
  if (auto it = map->find(name.key()); it != map->end()) return Resolution{it->second.values, false, it->second.text()};
  for (std::size_t n = name.segments.size(); n-- > 1;) {
    auto it = map->find(name.key(n));
    if (it == map->end()) continue;
    const auto* tmpl = it->second.template_value();
    if (!tmpl) continue;
    std::vector<std::string> rest(name.segments.begin() + static_cast<std::ptrdiff_t>(n), name.segments.end());
    return Resolution{TemplateRule::parse(tmpl->data).expand(join(rest, "/"), tmpl->timestamp), true,
                      it->second.text()};
  }
  not_found(handle_text);
}

std::optional<Handle> HandleRegistry::find(std::string_view handle_text) const {
  const auto name = HandleName::parse(handle_text);
  const auto map = snapshot();
  auto it = map->find(name.key());
  if (it == map->end()) return std::nullopt;
  return it->second;
}

Handle HandleRegistry::update(std::string_view handle_text, std::vector<HandleValue> values) {
  const auto name = HandleName::parse(handle_text);
  values = prepare(std::move(values));
  std::lock_guard write(write_mu_);
  auto current = snapshot();
  auto it = current->find(name.key());
  if (it == current->end()) not_found(handle_text);
  Handle h = it->second;
  h.values = std::move(values);
  persist_put(h);
  auto next = std::make_shared<Map>(*current);
  (*next)[name.key()] = h;
  publish(std::move(next));
  return h;
}

void HandleRegistry::remove(std::string_view handle_text) {
  const auto name = HandleName::parse(handle_text);
  std::lock_guard write(write_mu_);
  auto current = snapshot();
  if (!current->count(name.key())) not_found(handle_text);
  persist_remove(name.key());
  auto next = std::make_shared<Map>(*current);
  next->erase(name.key());
  publish(std::move(next));
}

std::size_t HandleRegistry::size() const { return snapshot()->size(); }

}  // namespace lago::pid
