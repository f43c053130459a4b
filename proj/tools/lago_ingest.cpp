// lago-ingest: batch SAF build, deposit and export.
#include <iostream>

#include <CLI11.hpp>

#include "lago/common/error.hpp"
#include "lago/ingest/batch.hpp"
#include "lago/ingest/build.hpp"
#include "lago/ingest/manifest.hpp"

using namespace lago;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kUsage = 2;

void print_report(const ingest::BatchReport& report) {
  for (const auto& item : report.items) {
    std::cout << item.package_dir << "\t" << ingest::to_string(item.status);
    if (item.receipt) std::cout << "\t" << item.receipt->item_uuid << "\t" << item.receipt->pid.value_or("");
    if (!item.identifier.empty()) std::cout << "\t" << item.identifier;
    if (!item.error.empty()) std::cout << "\t" << item.error;
    std::cout << "\n";
  }
  std::cout << "succeeded=" << report.succeeded << " failed=" << report.failed << " skipped=" << report.skipped
            << " elapsed_ms=" << report.elapsed.count() << "\n";
}

bool is_usage_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::ManifestUnreadable:
    case ErrorCode::ManifestEmpty:
    case ErrorCode::OutDirNotEmpty:
    case ErrorCode::NoPackagesFound:
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidValue:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bulk ingest and export for LAGO repository nodes"};
  app.require_subcommand(1);

  std::string manifest, out, profile_path;
  auto* scan = app.add_subcommand("scan", "build SAF packages from a CSV manifest");
  scan->add_option("--manifest", manifest, "manifest CSV")->required();
  scan->add_option("--out", out, "output directory (empty or absent)")->required();
  scan->add_option("--profile", profile_path, "metadata profile JSON (default: built-in)");

  std::string saf_dir, endpoint, collection, token;
  std::size_t parallel = ingest::kDefaultParallelism;
  auto* deposit = app.add_subcommand("deposit", "deposit SAF packages over SWORD");
  deposit->add_option("--saf", saf_dir, "directory of item_* packages")->required();
  deposit->add_option("--endpoint", endpoint, "node root URL")->required();
  deposit->add_option("--collection", collection, "target collection id")->required();
  deposit->add_option("--token", token, "deposit token")->required();
  deposit->add_option("--parallel", parallel, "concurrent deposits")->check(CLI::PositiveNumber);

  std::string set, from;
  auto* exp = app.add_subcommand("export", "harvest a node into SAF packages");
  exp->add_option("--endpoint", endpoint, "node root URL")->required();
  exp->add_option("--set", set, "setSpec to export");
  exp->add_option("--from", from, "only records changed at or after YYYY-MM-DD[Thh:mm:ssZ]");
  exp->add_option("--out", out, "output directory (empty or absent)")->required();
  exp->add_option("--parallel", parallel, "concurrent fetches")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*scan) {
      const auto profile =
          profile_path.empty() ? metadata::LagoProfile::builtin() : metadata::LagoProfile::load(profile_path);
      const auto result = ingest::scan_manifest(manifest, profile);
      for (const auto& e : result.errors) std::cerr << e.message << "\n";
      const auto packages = ingest::build_saf(result.descriptors, out);
      for (const auto& p : packages) std::cout << p.string() << "\n";
      std::cout << "packages=" << packages.size() << " rejected_rows=" << result.errors.size() << "\n";
      return result.errors.empty() ? kOk : kPartial;
    }
    http::HttpTransport transport;
    if (*deposit) {
      ingest::DepositOptions options;
      options.parallelism = parallel;
      const auto report =
          ingest::bulk_deposit(transport, SystemClock::instance(), saf_dir, endpoint, collection, token, options);
      print_report(report);
      return report.ok() ? kOk : kPartial;
    }
    if (*exp) {
      ingest::ExportOptions options;
      options.parallelism = parallel;
      if (!set.empty()) options.set = set;
      if (!from.empty()) {
        const auto parsed = parse_oai_date(from);
        if (!parsed) {
          std::cerr << "lago-ingest: --from must be YYYY-MM-DD or YYYY-MM-DDThh:mm:ssZ\n";
          return kUsage;
        }
        options.from = parsed->value;
      }
      const auto report = ingest::bulk_export(transport, SystemClock::instance(), endpoint, out, options);
      print_report(report);
      return report.ok() ? kOk : kPartial;
    }
  } catch (const Error& e) {
    std::cerr << "lago-ingest: " << e.what() << "\n";
    return is_usage_error(e.code()) ? kUsage : kPartial;
  } catch (const std::exception& e) {
    std::cerr << "lago-ingest: " << e.what() << "\n";
    return kPartial;
  }
  return kUsage;
}
