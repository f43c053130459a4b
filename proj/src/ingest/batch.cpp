#include "lago/ingest/batch.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "lago/common/digest.hpp"
#include "lago/common/files.hpp"
#include "lago/common/strings.hpp"
#include "lago/ingest/build.hpp"
#include "lago/metadata/serialize.hpp"
#include "lago/oaipmh/harvester.hpp"
#include "lago/oaipmh/identifier.hpp"
#include "lago/saf/saf.hpp"
#include "lago/sword/client.hpp"

namespace lago::ingest {

namespace fs = std::filesystem;

namespace {

// Runs task(i) for i in [0, n) on up to `parallelism` threads.
void run_pool(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) task(i);
  };
  const auto threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(n, 1));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
}

// Appends one line under an exclusive lock, shared with other processes.
class ReceiptCache {
 public:
  explicit ReceiptCache(fs::path path) : path_(std::move(path)) {}

  void append(const ReceiptCacheEntry& e) {
    std::lock_guard lock(mu_);
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + path_.string(), path_.string());
    ::flock(fd, LOCK_EX);
    const std::string line = e.package_dir + "\t" + e.item_uuid + "\t" + e.pid + "\n";
    const auto written = ::write(fd, line.data(), line.size());
    ::fsync(fd);
    ::flock(fd, LOCK_UN);
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size()))
      throw Error(ErrorCode::IoError, "short write to " + path_.string(), path_.string());
  }

 private:
  fs::path path_;
  std::mutex mu_;
};

void tally(BatchReport& report) {
  for (const auto& item : report.items) {
    if (item.status == ItemStatus::Failed)
      ++report.failed;
    else if (item.status == ItemStatus::Skipped)
      ++report.skipped;
    else
      ++report.succeeded;
  }
}

void record_failure(ItemOutcome& out, const std::exception& e) {
  out.status = ItemStatus::Failed;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    out.error_code = err->code();
    out.error = err->what();
  } else {
    out.error = e.what();
  }
}

}  // namespace

std::string_view to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::Deposited: return "deposited";
    case ItemStatus::Exported: return "exported";
    case ItemStatus::Skipped: return "skipped";
    case ItemStatus::Failed: return "failed";
  }
  return "failed";
}

std::vector<ReceiptCacheEntry> read_receipt_cache(const fs::path& saf_dir) {
  const auto path = saf_dir / kReceiptCacheFile;
  std::error_code ec;
  if (!fs::exists(path, ec)) return {};
  std::vector<ReceiptCacheEntry> out;
  for (const auto& line : split(read_file(path), '\n')) {
    const auto parts = split(line, '\t');
    // A torn last line from an interrupted run is ignored.
    if (parts.size() != 3 || !is_uuid(parts[1])) continue;
    out.push_back(ReceiptCacheEntry{parts[0], parts[1], parts[2]});
  }
  return out;
}

std::vector<fs::path> list_packages(const fs::path& saf_dir) {
  std::error_code ec;
  if (!fs::is_directory(saf_dir, ec))
    throw Error(ErrorCode::NoPackagesFound, saf_dir.string() + " is not a directory", saf_dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(saf_dir, ec))
    if (e.is_directory() && e.path().filename().string().starts_with("item_")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

BatchReport bulk_deposit(http::Transport& transport, Clock& clock, const fs::path& saf_dir,
                         const std::string& endpoint, const std::string& collection_id, const std::string& token,
                         const DepositOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const auto packages = list_packages(saf_dir);
  if (packages.empty()) throw Error(ErrorCode::NoPackagesFound, "no item_* packages in " + saf_dir.string());

  std::map<std::string, ReceiptCacheEntry> done;
  for (auto& e : read_receipt_cache(saf_dir)) done.emplace(e.package_dir, e);
  ReceiptCache cache(saf_dir / kReceiptCacheFile);

  BatchReport report;
  report.items.resize(packages.size());
  run_pool(packages.size(), options.parallelism, [&](std::size_t i) {
    auto& out = report.items[i];
    out.package_dir = packages[i].filename().string();
    if (auto it = done.find(out.package_dir); it != done.end()) {
      out.status = ItemStatus::Skipped;
      return;
    }
    try {
      sword::ClientOptions client;
      client.retry = options.retry;
      const auto zip = saf::zip_package(packages[i]);
      auto receipt = sword::client_deposit_bytes(transport, clock, endpoint, collection_id, zip, token, client);
      cache.append(ReceiptCacheEntry{out.package_dir, receipt.item_uuid, receipt.pid.value_or("")});
      out.status = ItemStatus::Deposited;
      out.receipt = std::move(receipt);
    } catch (const std::exception& e) {
      record_failure(out, e);
    }
  });
  tally(report);
  report.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  return report;
}

BatchReport bulk_export(http::Transport& transport, Clock& clock, const std::string& endpoint,
                        const fs::path& out_dir, const ExportOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  prepare_out_dir(out_dir);

  struct Pending {
    std::string identifier;
    metadata::LagoDocument doc;
    std::string parse_error;
  };
  std::vector<Pending> pending;
  oaipmh::HarvestOptions harvest;
  harvest.base_url = endpoint + "/oai";
  harvest.metadata_prefix = "lago";
  harvest.from = options.from;
  harvest.set = options.set;
  harvest.retry = options.retry;
  // A restarted harvest re-delivers records; keep the last copy of each.
  std::map<std::string, std::size_t> seen;
  oaipmh::harvest(transport, clock, harvest, [&](const oaipmh::Record& r) {
    if (r.header.deleted || !r.metadata) return;
    Pending p;
    p.identifier = r.header.identifier;
    try {
      p.doc = metadata::parse_lago_document(*r.metadata);
    } catch (const Error& e) {
      p.parse_error = e.what();
    }
    if (auto it = seen.find(p.identifier); it != seen.end()) {
      pending[it->second] = std::move(p);
    } else {
      seen.emplace(p.identifier, pending.size());
      pending.push_back(std::move(p));
    }
  });

  BatchReport report;
  report.items.resize(pending.size());
  run_pool(pending.size(), options.parallelism, [&](std::size_t i) {
    auto& out = report.items[i];
    const auto& p = pending[i];
    out.package_dir = package_name(i);
    out.identifier = p.identifier;
    try {
      if (!p.parse_error.empty()) throw Error(ErrorCode::ProtocolError, p.parse_error, p.identifier);
      const auto id = oaipmh::OaiIdentifier::parse(p.identifier);
      if (!id) throw Error(ErrorCode::ProtocolError, "unparseable identifier", p.identifier);
      saf::SafItem item;
      item.record = p.doc.record;
      for (const auto& b : p.doc.bitstreams) {
        http::Request request;
        request.path = "/items/" + id->uuid + "/bitstreams/" + b.name;
        const auto response = http::send_with_retry(transport, clock, endpoint, request, options.retry);
        if (response.status != 200) {
          ErrorCode code = ErrorCode::NotFound;
          parse_error_code(response.header("X-Error-Code"), code);
          throw Error(code, "bitstream " + b.name + " answered HTTP " + std::to_string(response.status), b.name);
        }
        const auto actual = md5_hex(response.body);
        if (actual != b.md5)
          throw Error(ErrorCode::IntegrityError, "bitstream " + b.name + " has MD5 " + actual + ", expected " + b.md5,
                      b.name);
        item.files.push_back(saf::SafFile{b.name, response.body});
      }
      saf::write_package(out_dir / out.package_dir, item);
      out.status = ItemStatus::Exported;
    } catch (const std::exception& e) {
      record_failure(out, e);
    }
  });
  tally(report);
  report.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  return report;
}

}  // namespace lago::ingest
