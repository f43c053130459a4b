#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/common/time.hpp"
#include "lago/metadata/profile.hpp"
#include "lago/metadata/record.hpp"
#include "lago/metadata/serialize.hpp"

namespace lago::store {

using metadata::MetadataRecord;
using metadata::OriginTag;

enum class ItemStatus { Active, Deleted };
enum class CollectionKind { Local, Mirror };

std::string_view to_string(ItemStatus s);
std::string_view to_string(CollectionKind k);

struct Community {
  std::string id;
  std::string name;

  friend bool operator==(const Community&, const Community&) = default;
};

struct Collection {
  std::string id;
  std::string name;
  std::string community;
  CollectionKind kind = CollectionKind::Local;
  // Peer node name, for mirror collections.
  std::optional<std::string> mirror_of;

  // OAI setSpec: "<kind>:<id>"
  std::string set_spec() const;

  friend bool operator==(const Collection&, const Collection&) = default;
};

struct Bitstream {
  std::string name;
  std::uint64_t size_bytes = 0;
  std::string md5;
  std::string media_type;
  std::string storage_key;

  metadata::BitstreamRef ref() const { return {name, size_bytes, md5, media_type}; }

  friend bool operator==(const Bitstream&, const Bitstream&) = default;
};

struct Item {
  std::string uuid;
  std::string collection;
  MetadataRecord metadata;
  std::vector<Bitstream> bitstreams;
  Timestamp datestamp{};
  ItemStatus status = ItemStatus::Active;
  OriginTag provenance;

  bool deleted() const { return status == ItemStatus::Deleted; }

  friend bool operator==(const Item&, const Item&) = default;
};

struct FileInput {
  std::string name;
  std::string bytes;
  // Inferred from the file extension when empty.
  std::string media_type;
};

// Total order used by list queries and resumption.
struct ItemKey {
  Timestamp datestamp{};
  std::string uuid;

  friend auto operator<=>(const ItemKey&, const ItemKey&) = default;
  friend bool operator==(const ItemKey&, const ItemKey&) = default;
};

struct ListQuery {
  std::optional<Timestamp> from;
  std::optional<Timestamp> until;
  // Collection id; both local and mirror collections are addressable.
  std::optional<std::string> collection;
};

struct ItemPage {
  std::vector<Item> items;
  std::size_t total = 0;
};

enum class Validation { Profile, NamesOnly };

struct CreateOptions {
  std::optional<std::string> uuid;
  // Defaults to this node with no original identifier.
  std::optional<OriginTag> origin;
  // Mirrored records are checked for well-formed field names only: the origin
  // node's profile is authoritative for them.
  Validation validation = Validation::Profile;
};

struct StoreOptions {
  // fdatasync the catalog log after every record.
  bool durable = true;
};

// Local catalog and content-addressed blob store for one node.
//
// On disk (see docs/formats.md):
//   <dataDir>/catalog.log                line-delimited JSON records, last one per key wins
//   <dataDir>/blobs/<md5[0:2]>/<md5>     content, one file per distinct byte string
//
// Writers are serialized; readers take a shared lock and see the state as of
// the last completed write.
class Store {
 public:
  Store(std::filesystem::path data_dir, std::string node_name, metadata::LagoProfile profile, Clock& clock,
        StoreOptions options = {});

  const std::string& node_name() const { return node_name_; }
  const metadata::LagoProfile& profile() const { return profile_; }
  Clock& clock() const { return clock_; }

  void add_community(const Community& community);
  // Idempotent for an identical definition; throws InvalidValue on conflict.
  void add_collection(const Collection& collection);
  std::optional<Collection> find_collection(const std::string& id) const;
  std::vector<Collection> collections() const;
  std::vector<Community> communities() const;

  Item create_item(const std::string& collection, MetadataRecord metadata, std::vector<FileInput> files,
                   const CreateOptions& options = {});
  // Replaces metadata (and bitstreams, when given). Tombstones stay deleted.
  Item update_item(const std::string& uuid, MetadataRecord metadata, Validation validation = Validation::Profile);
  Item replace_bitstreams(const std::string& uuid, std::vector<FileInput> files);
  // Idempotent: deleting a tombstone returns it unchanged.
  Item soft_delete_item(const std::string& uuid);

  Item get_item(const std::string& uuid) const;
  std::optional<Item> find_item(const std::string& uuid) const;
  // Mirror copy of an item from another node, keyed by its original identifier
  // (or, failing that, the identifier of the copy it was harvested from).
  std::optional<Item> find_by_origin(const std::string& identifier) const;

  // Verified content; throws UnknownBitstream or IntegrityError.
  std::string open_bitstream(const std::string& storage_key) const;

  ItemPage list_items(const ListQuery& query, std::size_t offset, std::size_t limit) const;
  // Keyset variant: items strictly after `after` in (datestamp, uuid) order.
  ItemPage list_items_after(const ListQuery& query, const std::optional<ItemKey>& after, std::size_t limit) const;
  std::size_t count_items(const ListQuery& query) const;

  std::optional<Timestamp> earliest_datestamp() const;
  std::size_t size() const;
  std::size_t blob_count() const;
  std::vector<Item> all_items() const;
  // SHA-256 over the canonical serialization of every item in uuid order.
  std::string catalog_hash() const;

  std::filesystem::path blob_path(const std::string& storage_key) const;

  // Test hook: called with "blob" before each new blob is written and with
  // "log" before each catalog append. Throwing simulates a storage fault.
  void set_fault_hook(std::function<void(std::string_view)> hook);

 private:
  void replay();
  void check_range(const ListQuery& query) const;
  bool matches(const Item& item, const ListQuery& query) const;
  void validate(const MetadataRecord& record, Validation validation) const;
  std::vector<Bitstream> store_files(std::vector<FileInput>& files, std::vector<std::filesystem::path>& created);
  void commit(const Item& item, const std::vector<std::filesystem::path>& created_blobs);
  void index(const Item& item);
  void fault(std::string_view point) const;

  std::filesystem::path data_dir_;
  std::filesystem::path log_path_;
  std::string node_name_;
  metadata::LagoProfile profile_;
  Clock& clock_;
  StoreOptions options_;

  mutable std::shared_mutex mu_;
  std::map<std::string, Community> communities_;
  std::map<std::string, Collection> collections_;
  std::map<std::string, Item> items_;
  std::set<ItemKey> order_;
  std::map<std::string, std::string> by_origin_;
  std::function<void(std::string_view)> fault_hook_;
};

// Serialized form of an item as stored in the catalog log.
std::string item_to_json(const Item& item);

}  // namespace lago::store
