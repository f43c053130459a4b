#include "lago/federation/sync.hpp"

#include <nlohmann/json.hpp>

#include "lago/common/digest.hpp"
#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/metadata/serialize.hpp"
#include "lago/oaipmh/harvester.hpp"
#include "lago/oaipmh/identifier.hpp"

namespace lago::federation {

using nlohmann::json;

namespace {

constexpr std::string_view kMirrorCommunity = "mirrors";

json report_json(const SyncReport& r) {
  json j{{"peer", r.peer},
         {"received", r.received},
         {"created", r.created},
         {"updated", r.updated},
         {"deleted", r.deleted},
         {"skippedForeign", r.skipped_foreign},
         {"unchanged", r.unchanged},
         {"startedAt", format_datestamp(r.started_at)},
         {"durationMs", r.duration.count()},
         {"ok", r.ok}};
  if (!r.error.empty()) j["error"] = r.error;
  if (r.checkpoint) j["checkpoint"] = format_datestamp(*r.checkpoint);
  return j;
}

std::optional<Timestamp> stamp(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  return parse_datestamp(j[key].get<std::string>());
}

SyncReport report_from_json(const json& j) {
  SyncReport r;
  r.peer = j.value("peer", "");
  r.received = j.value("received", 0);
  r.created = j.value("created", 0);
  r.updated = j.value("updated", 0);
  r.deleted = j.value("deleted", 0);
  r.skipped_foreign = j.value("skippedForeign", 0);
  r.unchanged = j.value("unchanged", 0);
  r.started_at = stamp(j, "startedAt").value_or(Timestamp{});
  r.duration = std::chrono::milliseconds{j.value("durationMs", 0)};
  r.ok = j.value("ok", false);
  r.error = j.value("error", "");
  r.checkpoint = stamp(j, "checkpoint");
  return r;
}

std::vector<std::string> sets_to_harvest(http::Transport& transport, Clock& clock, const PeerConfig& peer,
                                         const SyncOptions& options) {
  const auto allowed = [&](const std::string& spec) {
    return spec.starts_with("local:") || (options.transitive && spec.starts_with("mirror:"));
  };
  std::vector<std::string> out;
  if (peer.sets) {
    for (const auto& s : *peer.sets)
      if (allowed(s)) out.push_back(s);
    return out;
  }
  for (const auto& s : oaipmh::fetch_sets(transport, clock, peer.base_url + "/oai", options.retry))
    if (allowed(s.spec)) out.push_back(s.spec);
  return out;
}

std::vector<store::FileInput> fetch_content(http::Transport& transport, Clock& clock, const PeerConfig& peer,
                                            const std::string& uuid, const metadata::LagoDocument& doc,
                                            const SyncOptions& options) {
  std::vector<store::FileInput> files;
  for (const auto& b : doc.bitstreams) {
    http::Request request;
    request.path = "/items/" + uuid + "/bitstreams/" + b.name;
    const auto response = http::send_with_retry(transport, clock, peer.base_url, request, options.retry);
    if (response.status != 200)
      throw Error(ErrorCode::ProtocolError, "bitstream " + b.name + " answered HTTP " + std::to_string(response.status),
                  b.name);
    if (md5_hex(response.body) != b.md5)
      throw Error(ErrorCode::IntegrityError, "bitstream " + b.name + " failed MD5 verification", b.name);
    files.push_back(store::FileInput{b.name, response.body, b.media_type});
  }
  return files;
}

std::vector<metadata::BitstreamRef> refs(const store::Item& item) {
  std::vector<metadata::BitstreamRef> out;
  for (const auto& b : item.bitstreams) out.push_back(b.ref());
  return out;
}

}  // namespace

SyncState::SyncState(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.empty() || !std::filesystem::exists(path_, ec)) return;
  json j;
  try {
    j = json::parse(read_file(path_));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageError, "unreadable sync state: " + std::string(e.what()), path_.string());
  }
  const auto peers = j.value("peers", json::object());
  for (const auto& [peer, pj] : peers.items()) {
    PeerState s;
    s.last_checkpoint = stamp(pj, "lastCheckpoint");
    if (pj.contains("lastResult")) s.last_result = report_from_json(pj["lastResult"]);
    s.consecutive_failures = pj.value("consecutiveFailures", 0);
    peers_[peer] = std::move(s);
  }
}

PeerState SyncState::get(const std::string& peer) const {
  std::lock_guard lock(mu_);
  auto it = peers_.find(peer);
  return it == peers_.end() ? PeerState{} : it->second;
}

std::map<std::string, PeerState> SyncState::all() const {
  std::lock_guard lock(mu_);
  return peers_;
}

void SyncState::record(const SyncReport& report) {
  std::lock_guard lock(mu_);
  auto& s = peers_[report.peer];
  s.last_result = report;
  if (report.ok) {
    s.consecutive_failures = 0;
    if (report.checkpoint && (!s.last_checkpoint || *report.checkpoint > *s.last_checkpoint))
      s.last_checkpoint = report.checkpoint;
  } else {
    ++s.consecutive_failures;
  }
  save();
}

void SyncState::save() const {
  if (path_.empty()) return;
  json peers = json::object();
  for (const auto& [name, s] : peers_) {
    json pj{{"consecutiveFailures", s.consecutive_failures}};
    if (s.last_checkpoint) pj["lastCheckpoint"] = format_datestamp(*s.last_checkpoint);
    if (s.last_result) pj["lastResult"] = report_json(*s.last_result);
    peers[name] = std::move(pj);
  }
  write_file_atomic(path_, json{{"peers", peers}}.dump(2) + "\n");
}

std::string report_to_json(const SyncReport& report) { return report_json(report).dump(); }

store::Collection ensure_mirror_collection(store::Store& store, const std::string& peer) {
  store::Collection c{peer, "Mirror of " + peer, std::string(kMirrorCommunity), store::CollectionKind::Mirror, peer};
  if (auto existing = store.find_collection(peer)) {
    if (existing->kind != store::CollectionKind::Mirror)
      throw Error(ErrorCode::ConfigError, "collection '" + peer + "' exists and is not a mirror", peer);
    return *existing;
  }
  store.add_community(store::Community{std::string(kMirrorCommunity), "Mirrored collections"});
  store.add_collection(c);
  return c;
}

SyncReport sync_once(store::Store& store, http::Transport& transport, Clock& clock, const PeerConfig& peer,
                     SyncState& state, const SyncOptions& options, const SyncFaultHook& fault) {
  SyncReport report;
  report.peer = peer.name;
  report.started_at = clock.now_seconds();
  const auto started = clock.now();
  const auto previous = state.get(peer.name).last_checkpoint;
  report.checkpoint = previous;
  const auto hit = [&](std::string_view point) {
    if (fault) fault(point);
  };

  try {
    const auto oai = peer.base_url + "/oai";
    const auto identify = oaipmh::fetch_identify(transport, clock, oai, options.retry);
    if (identify.repository_name != peer.name)
      throw Error(ErrorCode::ProtocolError,
                  "peer at " + peer.base_url + " identifies as '" + identify.repository_name + "', expected '" +
                      peer.name + "'",
                  "Identify/repositoryName");
    if (identify.repository_name == store.node_name())
      throw Error(ErrorCode::ProtocolError, "peer claims this node's own name", "Identify/repositoryName");

    const auto mirror = ensure_mirror_collection(store, peer.name);
    std::optional<Timestamp> checkpoint;
    bool first_set = true;

    const auto apply = [&](const oaipmh::Record& record) {
      hit("record");
      ++report.received;
      const auto& header = record.header;
      if (header.deleted || !record.metadata) {
        auto existing = store.find_by_origin(header.identifier);
        if (existing && !existing->deleted() &&
            store.find_collection(existing->collection)->kind == store::CollectionKind::Mirror) {
          store.soft_delete_item(existing->uuid);
          ++report.deleted;
        } else {
          ++report.unchanged;
        }
        return;
      }
      auto doc = metadata::parse_lago_document(*record.metadata);
      const std::string origin_node = doc.provenance ? doc.provenance->node_name : peer.name;
      if (origin_node == store.node_name()) {
        ++report.skipped_foreign;
        return;
      }
      metadata::OriginTag origin{origin_node, header.identifier, std::nullopt};
      if (doc.provenance && doc.provenance->original_identifier) {
        origin.original_identifier = doc.provenance->original_identifier;
        origin.via_identifier = header.identifier;
      }

      auto existing = store.find_by_origin(*origin.original_identifier);
      if (!existing && origin.via_identifier) existing = store.find_by_origin(*origin.via_identifier);
      if (existing && store.find_collection(existing->collection)->kind != store::CollectionKind::Mirror) {
        // A local item answering to a foreign identifier is never overwritten.
        ++report.skipped_foreign;
        return;
      }

      const auto id = oaipmh::OaiIdentifier::parse(header.identifier);
      if (!id) throw Error(ErrorCode::ProtocolError, "unparseable identifier", header.identifier);

      if (!existing) {
        std::vector<store::FileInput> files;
        if (options.mirror_content) files = fetch_content(transport, clock, peer, id->uuid, doc, options);
        store::CreateOptions create;
        create.origin = origin;
        create.validation = store::Validation::NamesOnly;
        hit("commit");
        store.create_item(mirror.id, doc.record, std::move(files), create);
        ++report.created;
        return;
      }
      if (existing->deleted()) {
        ++report.unchanged;
        return;
      }
      const bool metadata_changed = existing->metadata != metadata::canonicalize(doc.record);
      const bool content_changed = options.mirror_content && refs(*existing) != doc.bitstreams;
      if (!metadata_changed && !content_changed) {
        ++report.unchanged;
        return;
      }
      hit("commit");
      if (metadata_changed) store.update_item(existing->uuid, doc.record, store::Validation::NamesOnly);
      if (content_changed)
        store.replace_bitstreams(existing->uuid, fetch_content(transport, clock, peer, id->uuid, doc, options));
      ++report.updated;
    };

    for (const auto& set : sets_to_harvest(transport, clock, peer, options)) {
      oaipmh::HarvestOptions harvest;
      harvest.base_url = oai;
      harvest.metadata_prefix = "lago";
      harvest.set = set;
      harvest.retry = options.retry;
      if (previous) harvest.from = *previous + std::chrono::seconds{1};
      const auto result = oaipmh::harvest(transport, clock, harvest, apply);
      // One checkpoint covers every set, so it is the least of the per-set ones.
      const auto next = oaipmh::advance_checkpoint(previous, result);
      if (first_set || (next && checkpoint && *next < *checkpoint)) checkpoint = next;
      first_set = false;
    }
    if (!first_set) report.checkpoint = checkpoint;
    report.ok = true;
  } catch (const std::exception& e) {
    report.ok = false;
    report.error = e.what();
    report.checkpoint = previous;
  }
  report.duration = std::chrono::duration_cast<std::chrono::milliseconds>(clock.now() - started);
  state.record(report);
  return report;
}

}  // namespace lago::federation
