#include "lago/store/store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "lago/common/digest.hpp"
#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"
#include "lago/metadata/validate.hpp"
#include "lago/store/media_type.hpp"

namespace lago::store {

using nlohmann::json;

std::string_view to_string(ItemStatus s) { return s == ItemStatus::Active ? "active" : "deleted"; }
std::string_view to_string(CollectionKind k) { return k == CollectionKind::Local ? "local" : "mirror"; }

std::string Collection::set_spec() const { return std::string(to_string(kind)) + ":" + id; }

namespace {

json field_to_json(const metadata::MetadataField& f) {
  json j{{"element", f.element}, {"value", f.value}};
  if (f.qualifier) j["qualifier"] = *f.qualifier;
  if (f.language) j["lang"] = *f.language;
  return j;
}

metadata::MetadataField field_from_json(const json& j) {
  metadata::MetadataField f;
  f.element = j.at("element").get<std::string>();
  f.value = j.at("value").get<std::string>();
  if (j.contains("qualifier")) f.qualifier = j["qualifier"].get<std::string>();
  if (j.contains("lang")) f.language = j["lang"].get<std::string>();
  return f;
}

json to_json(const Item& item) {
  json fields = json::array();
  for (const auto& f : item.metadata.fields) fields.push_back(field_to_json(f));
  json bitstreams = json::array();
  for (const auto& b : item.bitstreams)
    bitstreams.push_back({{"name", b.name},
                          {"size", b.size_bytes},
                          {"md5", b.md5},
                          {"mediaType", b.media_type},
                          {"storageKey", b.storage_key}});
  json origin{{"node", item.provenance.node_name}};
  if (item.provenance.original_identifier) origin["originalIdentifier"] = *item.provenance.original_identifier;
  if (item.provenance.via_identifier) origin["via"] = *item.provenance.via_identifier;
  return json{{"type", "item"},
              {"uuid", item.uuid},
              {"collection", item.collection},
              {"datestamp", format_datestamp(item.datestamp)},
              {"status", to_string(item.status)},
              {"origin", origin},
              {"metadata", fields},
              {"bitstreams", bitstreams}};
}

Item item_from_json(const json& j) {
  Item item;
  item.uuid = j.at("uuid").get<std::string>();
  item.collection = j.at("collection").get<std::string>();
  auto ds = parse_datestamp(j.at("datestamp").get<std::string>());
  if (!ds) throw Error(ErrorCode::StorageError, "catalog: bad datestamp for " + item.uuid);
  item.datestamp = *ds;
  item.status = j.at("status").get<std::string>() == "deleted" ? ItemStatus::Deleted : ItemStatus::Active;
  const auto& origin = j.at("origin");
  item.provenance.node_name = origin.at("node").get<std::string>();
  if (origin.contains("originalIdentifier"))
    item.provenance.original_identifier = origin["originalIdentifier"].get<std::string>();
  if (origin.contains("via")) item.provenance.via_identifier = origin["via"].get<std::string>();
  for (const auto& f : j.at("metadata")) item.metadata.fields.push_back(field_from_json(f));
  for (const auto& b : j.at("bitstreams"))
    item.bitstreams.push_back(Bitstream{b.at("name").get<std::string>(), b.at("size").get<std::uint64_t>(),
                                        b.at("md5").get<std::string>(), b.at("mediaType").get<std::string>(),
                                        b.at("storageKey").get<std::string>()});
  return item;
}

json to_json(const Collection& c) {
  json j{{"type", "collection"},
         {"id", c.id},
         {"name", c.name},
         {"community", c.community},
         {"kind", to_string(c.kind)}};
  if (c.mirror_of) j["mirrorOf"] = *c.mirror_of;
  return j;
}

bool valid_file_name(const std::string& name) {
  if (name.empty() || name == "." || name == ".." || name.find('/') != std::string::npos ||
      name.find('\\') != std::string::npos || name.find('\0') != std::string::npos)
    return false;
  return name != "contents" && name != "dublin_core.xml" && name != "metadata_lago.xml";
}

}  // namespace

std::string item_to_json(const Item& item) { return to_json(item).dump(); }

Store::Store(std::filesystem::path data_dir, std::string node_name, metadata::LagoProfile profile, Clock& clock,
             StoreOptions options)
    : data_dir_(std::move(data_dir)),
      log_path_(data_dir_ / "catalog.log"),
      node_name_(std::move(node_name)),
      profile_(std::move(profile)),
      clock_(clock),
      options_(options) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir_ / "blobs", ec);
  if (ec) throw Error(ErrorCode::StorageError, "cannot create " + (data_dir_ / "blobs").string(), data_dir_.string());
  replay();
}

void Store::replay() {
  std::ifstream in(log_path_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      // A torn final line from an interrupted append is dropped.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::StorageError, "catalog.log: corrupt record at line " + std::to_string(lineno),
                  std::to_string(lineno));
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "community") {
        Community c{j.at("id").get<std::string>(), j.at("name").get<std::string>()};
        communities_[c.id] = c;
      } else if (type == "collection") {
        Collection c;
        c.id = j.at("id").get<std::string>();
        c.name = j.at("name").get<std::string>();
        c.community = j.at("community").get<std::string>();
        c.kind = j.at("kind").get<std::string>() == "mirror" ? CollectionKind::Mirror : CollectionKind::Local;
        if (j.contains("mirrorOf")) c.mirror_of = j["mirrorOf"].get<std::string>();
        collections_[c.id] = c;
      } else if (type == "item") {
        index(item_from_json(j));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::StorageError,
                  "catalog.log: bad record at line " + std::to_string(lineno) + ": " + e.what(),
                  std::to_string(lineno));
    }
  }
}

void Store::index(const Item& item) {
  if (auto it = items_.find(item.uuid); it != items_.end()) order_.erase(ItemKey{it->second.datestamp, item.uuid});
  order_.insert(ItemKey{item.datestamp, item.uuid});
  if (item.provenance.original_identifier) by_origin_[*item.provenance.original_identifier] = item.uuid;
  if (item.provenance.via_identifier) by_origin_[*item.provenance.via_identifier] = item.uuid;
  items_[item.uuid] = item;
}

void Store::fault(std::string_view point) const {
  if (fault_hook_) fault_hook_(point);
}

void Store::set_fault_hook(std::function<void(std::string_view)> hook) {
  std::unique_lock lock(mu_);
  fault_hook_ = std::move(hook);
}

void Store::add_community(const Community& community) {
  if (!is_token(community.id)) throw Error(ErrorCode::InvalidValue, "bad community id '" + community.id + "'");
  std::unique_lock lock(mu_);
  if (auto it = communities_.find(community.id); it != communities_.end()) {
    if (it->second == community) return;
    throw Error(ErrorCode::InvalidValue, "community " + community.id + " already defined differently");
  }
  fault("log");
  append_line(log_path_, json{{"type", "community"}, {"id", community.id}, {"name", community.name}}.dump(),
              options_.durable);
  communities_[community.id] = community;
}

void Store::add_collection(const Collection& collection) {
  if (!is_token(collection.id)) throw Error(ErrorCode::InvalidValue, "bad collection id '" + collection.id + "'");
  if (collection.kind == CollectionKind::Mirror && !collection.mirror_of)
    throw Error(ErrorCode::InvalidValue, "mirror collection " + collection.id + " must name its peer");
  std::unique_lock lock(mu_);
  if (auto it = collections_.find(collection.id); it != collections_.end()) {
    if (it->second == collection) return;
    throw Error(ErrorCode::InvalidValue, "collection " + collection.id + " already defined differently");
  }
  fault("log");
  append_line(log_path_, to_json(collection).dump(), options_.durable);
  collections_[collection.id] = collection;
}

std::optional<Collection> Store::find_collection(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = collections_.find(id);
  if (it == collections_.end()) return std::nullopt;
  return it->second;
}

std::vector<Collection> Store::collections() const {
  std::shared_lock lock(mu_);
  std::vector<Collection> out;
  for (const auto& [id, c] : collections_) out.push_back(c);
  return out;
}

std::vector<Community> Store::communities() const {
  std::shared_lock lock(mu_);
  std::vector<Community> out;
  for (const auto& [id, c] : communities_) out.push_back(c);
  return out;
}

void Store::validate(const MetadataRecord& record, Validation validation) const {
  if (validation == Validation::Profile) {
    auto report = metadata::validate_record(record, profile_);
    if (!report.ok) throw metadata::ValidationRejected(std::move(report));
    return;
  }
  metadata::ValidationReport report;
  for (std::size_t i = 0; i < record.fields.size(); ++i) {
    const auto& f = record.fields[i];
    if (!metadata::is_field_name(f.element) || (f.qualifier && !metadata::is_field_name(*f.qualifier)))
      report.add(metadata::Severity::Error, f.key() + "[" + std::to_string(i) + "]", "malformed field name");
  }
  if (!report.ok) throw metadata::ValidationRejected(std::move(report));
}

namespace {

// Rollback of blobs written by a failed operation; the prefix directory goes
// too when the blob was its only entry.
void remove_blobs(const std::vector<std::filesystem::path>& paths) {
  std::error_code ec;
  for (const auto& p : paths) {
    std::filesystem::remove(p, ec);
    std::filesystem::remove(p.parent_path(), ec);
  }
}

}  // namespace

std::filesystem::path Store::blob_path(const std::string& storage_key) const {
  return data_dir_ / "blobs" / storage_key.substr(0, 2) / storage_key;
}

std::vector<Bitstream> Store::store_files(std::vector<FileInput>& files, std::vector<std::filesystem::path>& created) {
  std::vector<Bitstream> out;
  std::set<std::string> names;
  for (auto& f : files) {
    if (!valid_file_name(f.name)) throw Error(ErrorCode::InvalidValue, "bad bitstream name '" + f.name + "'", f.name);
    if (!names.insert(f.name).second)
      throw Error(ErrorCode::InvalidValue, "duplicate bitstream name '" + f.name + "'", f.name);
  }
  for (auto& f : files) {
    Bitstream b;
    b.name = f.name;
    b.size_bytes = f.bytes.size();
    b.md5 = md5_hex(f.bytes);
    b.media_type = f.media_type.empty() ? media_type_for(f.name) : f.media_type;
    b.storage_key = b.md5;
    const auto path = blob_path(b.storage_key);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
      fault("blob");
      std::filesystem::create_directories(path.parent_path(), ec);
      try {
        write_file_atomic(path, f.bytes);
      } catch (const Error& e) {
        throw Error(ErrorCode::StorageError, e.what(), path.string());
      }
      created.push_back(path);
    }
    out.push_back(std::move(b));
  }
  return out;
}

void Store::commit(const Item& item, const std::vector<std::filesystem::path>& created_blobs) {
  try {
    fault("log");
    append_line(log_path_, item_to_json(item), options_.durable);
  } catch (...) {
    remove_blobs(created_blobs);
    throw;
  }
  index(item);
}

Item Store::create_item(const std::string& collection, MetadataRecord metadata, std::vector<FileInput> files,
                        const CreateOptions& options) {
  metadata = metadata::canonicalize(std::move(metadata));
  validate(metadata, options.validation);

  std::unique_lock lock(mu_);
  if (collections_.count(collection) == 0)
    throw Error(ErrorCode::UnknownCollection, "no collection '" + collection + "'", collection);

  Item item;
  item.uuid = options.uuid.value_or(generate_uuid());
  if (!is_uuid(item.uuid)) throw Error(ErrorCode::InvalidValue, "malformed uuid '" + item.uuid + "'", item.uuid);
  if (items_.count(item.uuid)) throw Error(ErrorCode::InvalidValue, "uuid already in use", item.uuid);
  item.collection = collection;
  item.metadata = std::move(metadata);
  item.datestamp = clock_.now_seconds();
  item.status = ItemStatus::Active;
  item.provenance = options.origin.value_or(OriginTag{node_name_, {}, {}});

  std::vector<std::filesystem::path> created;
  try {
    item.bitstreams = store_files(files, created);
  } catch (...) {
    remove_blobs(created);
    throw;
  }
  commit(item, created);
  return item;
}

Item Store::update_item(const std::string& uuid, MetadataRecord metadata, Validation validation) {
  metadata = metadata::canonicalize(std::move(metadata));
  validate(metadata, validation);
  std::unique_lock lock(mu_);
  auto it = items_.find(uuid);
  if (it == items_.end()) throw Error(ErrorCode::UnknownItem, "no item " + uuid, uuid);
  if (it->second.deleted()) return it->second;
  Item item = it->second;
  item.metadata = std::move(metadata);
  item.datestamp = std::max(clock_.now_seconds(), item.datestamp);
  commit(item, {});
  return item;
}

Item Store::replace_bitstreams(const std::string& uuid, std::vector<FileInput> files) {
  std::unique_lock lock(mu_);
  auto it = items_.find(uuid);
  if (it == items_.end()) throw Error(ErrorCode::UnknownItem, "no item " + uuid, uuid);
  if (it->second.deleted()) return it->second;
  Item item = it->second;
  std::vector<std::filesystem::path> created;
  try {
    item.bitstreams = store_files(files, created);
  } catch (...) {
    remove_blobs(created);
    throw;
  }
  item.datestamp = std::max(clock_.now_seconds(), item.datestamp);
  commit(item, created);
  return item;
}

Item Store::soft_delete_item(const std::string& uuid) {
  std::unique_lock lock(mu_);
  auto it = items_.find(uuid);
  if (it == items_.end()) throw Error(ErrorCode::UnknownItem, "no item " + uuid, uuid);
  if (it->second.deleted()) return it->second;
  Item item = it->second;
  item.status = ItemStatus::Deleted;
  item.metadata = {};
  item.bitstreams.clear();
  item.datestamp = std::max(clock_.now_seconds(), item.datestamp);
  commit(item, {});
  return item;
}

Item Store::get_item(const std::string& uuid) const {
  auto item = find_item(uuid);
  if (!item) throw Error(ErrorCode::UnknownItem, "no item " + uuid, uuid);
  return *item;
}

std::optional<Item> Store::find_item(const std::string& uuid) const {
  std::shared_lock lock(mu_);
  auto it = items_.find(uuid);
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

std::optional<Item> Store::find_by_origin(const std::string& identifier) const {
  std::shared_lock lock(mu_);
  auto it = by_origin_.find(identifier);
  if (it == by_origin_.end()) return std::nullopt;
  return items_.at(it->second);
}

std::string Store::open_bitstream(const std::string& storage_key) const {
  if (!is_lower_hex(storage_key, 32))
    throw Error(ErrorCode::UnknownBitstream, "malformed storage key '" + storage_key + "'", storage_key);
  const auto path = blob_path(storage_key);
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::UnknownBitstream, "no blob " + storage_key, storage_key);
  }
  if (md5_hex(bytes) != storage_key)
    throw Error(ErrorCode::IntegrityError, "stored content of " + storage_key + " no longer matches its MD5",
                storage_key);
  return bytes;
}

void Store::check_range(const ListQuery& query) const {
  if (query.from && query.until && *query.from > *query.until)
    throw Error(ErrorCode::InvalidRange, "from " + format_datestamp(*query.from) + " is after until " +
                                             format_datestamp(*query.until));
}

bool Store::matches(const Item& item, const ListQuery& query) const {
  if (query.from && item.datestamp < *query.from) return false;
  if (query.until && item.datestamp > *query.until) return false;
  if (query.collection && item.collection != *query.collection) return false;
  return true;
}

ItemPage Store::list_items(const ListQuery& query, std::size_t offset, std::size_t limit) const {
  check_range(query);
  if (limit == 0) throw Error(ErrorCode::InvalidRange, "limit must be at least 1");
  std::shared_lock lock(mu_);
  ItemPage page;
  auto it = query.from ? order_.lower_bound(ItemKey{*query.from, {}}) : order_.begin();
  for (; it != order_.end(); ++it) {
    if (query.until && it->datestamp > *query.until) break;
    const auto& item = items_.at(it->uuid);
    if (!matches(item, query)) continue;
    if (page.total >= offset && page.items.size() < limit) page.items.push_back(item);
    ++page.total;
  }
  return page;
}

ItemPage Store::list_items_after(const ListQuery& query, const std::optional<ItemKey>& after, std::size_t limit) const {
  check_range(query);
  if (limit == 0) throw Error(ErrorCode::InvalidRange, "limit must be at least 1");
  std::shared_lock lock(mu_);
  ItemPage page;
  auto it = query.from ? order_.lower_bound(ItemKey{*query.from, {}}) : order_.begin();
  for (; it != order_.end(); ++it) {
    if (query.until && it->datestamp > *query.until) break;
    const auto& item = items_.at(it->uuid);
    if (!matches(item, query)) continue;
    ++page.total;
    if (after && !(*after < *it)) continue;
    if (page.items.size() < limit) page.items.push_back(item);
  }
  return page;
}

std::size_t Store::count_items(const ListQuery& query) const { return list_items(query, 0, 1).total; }

std::optional<Timestamp> Store::earliest_datestamp() const {
  std::shared_lock lock(mu_);
  if (order_.empty()) return std::nullopt;
  return order_.begin()->datestamp;
}

std::size_t Store::size() const {
  std::shared_lock lock(mu_);
  return items_.size();
}

std::size_t Store::blob_count() const {
  std::size_t n = 0;
  std::error_code ec;
  for (auto it = std::filesystem::recursive_directory_iterator(data_dir_ / "blobs", ec);
       it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file()) ++n;
  }
  return n;
}

std::vector<Item> Store::all_items() const {
  std::shared_lock lock(mu_);
  std::vector<Item> out;
  out.reserve(items_.size());
  for (const auto& [uuid, item] : items_) out.push_back(item);
  return out;
}

std::string Store::catalog_hash() const {
  std::shared_lock lock(mu_);
  std::string all;
  for (const auto& [uuid, item] : items_) {
    all += item_to_json(item);
    all += '\n';
  }
  return sha256_hex(all);
}

}  // namespace lago::store
