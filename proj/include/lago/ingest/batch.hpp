#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/common/error.hpp"
#include "lago/http/http.hpp"
#include "lago/sword/documents.hpp"

namespace lago::ingest {

inline constexpr std::string_view kReceiptCacheFile = ".receipts";
inline constexpr std::size_t kDefaultParallelism = 4;

enum class ItemStatus { Deposited, Exported, Skipped, Failed };
std::string_view to_string(ItemStatus s);

struct ItemOutcome {
  std::string package_dir;  // directory name within the SAF root
  ItemStatus status = ItemStatus::Failed;
  std::optional<sword::DepositReceipt> receipt;
  // Source record identifier for exports.
  std::string identifier;
  std::optional<ErrorCode> error_code;
  std::string error;
};

struct BatchReport {
  // Input order, whatever the completion order was.
  std::vector<ItemOutcome> items;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  std::chrono::milliseconds elapsed{0};

  bool ok() const { return failed == 0; }
};

struct DepositOptions {
  std::size_t parallelism = kDefaultParallelism;
  http::RetryPolicy retry;
};

// Line-delimited "packageDir<TAB>itemUuid<TAB>pid" records of finished deposits.
struct ReceiptCacheEntry {
  std::string package_dir;
  std::string item_uuid;
  std::string pid;
};
std::vector<ReceiptCacheEntry> read_receipt_cache(const std::filesystem::path& saf_dir);

// Package directories (item_*) in name order.
std::vector<std::filesystem::path> list_packages(const std::filesystem::path& saf_dir);

// Deposits every package not yet in the receipt cache. One failure never
// stops the batch. Throws NoPackagesFound.
BatchReport bulk_deposit(http::Transport& transport, Clock& clock, const std::filesystem::path& saf_dir,
                         const std::string& endpoint, const std::string& collection_id, const std::string& token,
                         const DepositOptions& options = {});

struct ExportOptions {
  std::optional<std::string> set;
  std::optional<Timestamp> from;
  std::size_t parallelism = kDefaultParallelism;
  http::RetryPolicy retry;
};

// Harvests the lago format from `endpoint` (node root URL), fetches and
// verifies every bitstream, and writes one SAF package per live record.
// Throws OutDirNotEmpty, TransportError, ProtocolError; per-item failures
// (IntegrityError, missing content) live in the report.
BatchReport bulk_export(http::Transport& transport, Clock& clock, const std::string& endpoint,
                        const std::filesystem::path& out_dir, const ExportOptions& options = {});

}  // namespace lago::ingest
