#include "lago/federation/node.hpp"

#include <future>

#include <nlohmann/json.hpp>

#include "lago/common/digest.hpp"
#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"
#include "lago/pid/rest.hpp"

namespace lago::federation {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTokenKeyFile = "oai-token.key";

std::string token_secret(const NodeConfig& config) {
  if (!config.token_secret.empty()) return config.token_secret;
  const auto path = config.data_dir / kTokenKeyFile;
  std::error_code ec;
  if (fs::exists(path, ec)) {
    auto key = std::string(trim(read_file(path)));
    if (!key.empty()) return key;
  }
  auto key = to_hex(random_bytes(32));
  write_file_atomic(path, key + "\n");
  return key;
}

http::Response json_response(int status, const json& body) {
  return http::text_response(status, "application/json", body.dump() + "\n");
}

http::Response error_json(int status, const Error& e) {
  auto r = json_response(status, json{{"error", std::string(to_string(e.code()))}, {"message", e.message()}});
  r.headers["X-Error-Code"] = std::string(to_string(e.code()));
  return r;
}

}  // namespace

void OpsLog::write(Clock& clock, std::string_view event, const std::string& json_fields) {
  json j = json_fields.empty() ? json::object() : json::parse(json_fields);
  j["ts"] = format_datestamp(clock.now_seconds());
  j["event"] = std::string(event);
  std::lock_guard lock(mu_);
  append_line(path_, j.dump(), false);
}

Node::Node(NodeConfig config, Clock& clock, http::Transport& peers, NodeOptions options)
    : config_(std::move(config)), clock_(clock), peers_(peers), options_(options) {
  std::error_code ec;
  fs::create_directories(config_.data_dir, ec);
  if (ec)
    throw Error(ErrorCode::IoError, "cannot create data directory " + config_.data_dir.string() + ": " + ec.message(),
                config_.data_dir.string());
  auto profile = config_.profile_path.empty() ? metadata::LagoProfile::builtin()
                                              : metadata::LagoProfile::load(config_.profile_path);
  store_ = std::make_unique<store::Store>(config_.data_dir, config_.node_name, std::move(profile), clock_,
                                          store::StoreOptions{options_.durable});
  pids_ = std::make_unique<pid::HandleRegistry>(config_.pid_prefix, clock_, config_.data_dir / "pid.log",
                                                options_.durable);
  for (const auto& c : config_.collections) {
    store_->add_community(store::Community{c.community, c.community});
    store_->add_collection(store::Collection{c.id, c.name, c.community, store::CollectionKind::Local, std::nullopt});
  }
  oaipmh::ProviderConfig pc;
  pc.repository_name = config_.node_name;
  pc.base_url = config_.public_url + "/oai";
  pc.page_size = config_.page_size;
  provider_ = std::make_unique<oaipmh::Provider>(*store_, pc, oaipmh::TokenCodec(token_secret(config_)));
  sword_ = std::make_unique<sword::SwordServer>(
      *store_, *pids_, sword::SwordConfig{config_.public_url, config_.deposit_token});
  sync_state_ = std::make_unique<SyncState>(config_.data_dir / "sync_state.json");
  ops_ = std::make_unique<OpsLog>(config_.data_dir / "ops.log");
  scheduler_ = std::make_unique<Scheduler>(
      config_.peers, [this](const PeerConfig& p) { return sync_peer(p); }, clock_, options_.scheduler);
}

Node::~Node() = default;

SyncReport Node::sync_peer(const PeerConfig& peer) {
  ops_->write(clock_, "sync-start", json{{"peer", peer.name}}.dump());
  SyncOptions so;
  so.transitive = config_.transitive;
  so.mirror_content = config_.mirror_content;
  so.retry = options_.retry;
  auto report = sync_once(*store_, peers_, clock_, peer, *sync_state_, so, sync_fault_);
  ops_->write(clock_, report.ok ? "sync-finish" : "sync-error", report_to_json(report));
  return report;
}

std::vector<SyncReport> Node::sync_all() {
  std::vector<std::future<SyncReport>> running;
  for (const auto& p : config_.peers)
    running.push_back(std::async(std::launch::async, [this, p] { return sync_peer(p); }));
  std::vector<SyncReport> out;
  for (auto& f : running) out.push_back(f.get());
  return out;
}

std::string Node::healthz_json() const {
  json peers = json::array();
  const auto states = sync_state_->all();
  for (const auto& p : config_.peers) {
    json pj{{"peerName", p.name}, {"baseUrl", p.base_url}};
    auto it = states.find(p.name);
    if (it == states.end() || !it->second.last_result) {
      pj["status"] = "never-synced";
    } else {
      const auto& s = it->second;
      pj["status"] = s.consecutive_failures == 0 ? "ok" : "failing";
      pj["consecutiveFailures"] = s.consecutive_failures;
      if (s.last_checkpoint) pj["lastCheckpoint"] = format_datestamp(*s.last_checkpoint);
      pj["lastResult"] = json::parse(report_to_json(*s.last_result));
    }
    peers.push_back(std::move(pj));
  }
  return json{{"nodeName", config_.node_name},
              {"status", "ok"},
              {"catalogSize", store_->size()},
              {"pidCount", pids_->size()},
              {"peers", peers}}
      .dump();
}

http::Response Node::serve_item(const std::string& rest) const {
  const auto slash = rest.find('/');
  const auto uuid = rest.substr(0, slash);
  const auto item = store_->find_item(uuid);
  if (!item) return error_json(404, Error(ErrorCode::UnknownItem, "no item " + uuid, uuid));
  if (slash == std::string::npos) return http::text_response(200, "application/json", store::item_to_json(*item) + "\n");

  constexpr std::string_view kBitstreams = "bitstreams/";
  const auto tail = std::string_view(rest).substr(slash + 1);
  if (!tail.starts_with(kBitstreams) || item->deleted())
    return error_json(404, Error(ErrorCode::UnknownBitstream, "no such resource", rest));
  const auto name = std::string(tail.substr(kBitstreams.size()));
  for (const auto& b : item->bitstreams) {
    if (b.name != name) continue;
    try {
      auto r = http::text_response(200, b.media_type, store_->open_bitstream(b.storage_key));
      r.headers["Content-MD5"] = b.md5;
      return r;
    } catch (const Error& e) {
      return error_json(e.code() == ErrorCode::IntegrityError ? 500 : 404, e);
    }
  }
  return error_json(404, Error(ErrorCode::UnknownBitstream, "no bitstream '" + name + "'", name));
}

http::Response Node::handle(const http::Request& request) {
  try {
    auto path = request.path;
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    if (path == "/oai") {
      if (request.method != "GET" && request.method != "POST")
        return http::text_response(405, "text/plain", "method not allowed\n");
      return provider_->handle_http(request);
    }
    if (path.starts_with("/sword/")) {
      auto routed = request;
      routed.path = path;
      return sword_->handle_http(routed);
    }
    if (path.starts_with("/pid/")) return pid::handle_pid_request(*pids_, config_.deposit_token, request);
    if (path.starts_with("/items/")) {
      if (request.method != "GET") return http::text_response(405, "text/plain", "method not allowed\n");
      return serve_item(path.substr(std::string_view("/items/").size()));
    }
    if (path == "/healthz") return http::text_response(200, "application/json", healthz_json() + "\n");
    return http::text_response(404, "text/plain", "not found\n");
  } catch (const Error& e) {
    return error_json(500, e);
  } catch (const std::exception& e) {
    return error_json(500, Error(ErrorCode::StorageError, e.what()));
  }
}

}  // namespace lago::federation
