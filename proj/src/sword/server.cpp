#include "lago/sword/server.hpp"

#include "lago/common/digest.hpp"
#include "lago/common/strings.hpp"
#include "lago/metadata/validate.hpp"
#include "lago/oaipmh/identifier.hpp"
#include "lago/saf/saf.hpp"
#include "lago/zip/zip.hpp"

namespace lago::sword {

namespace {

constexpr std::string_view kServicePath = "/sword/servicedocument";
constexpr std::string_view kDepositPath = "/sword/deposit/";

http::Response error_response(const Error& e) {
  return http::text_response(http_status_for(e.code()), "application/xml; charset=UTF-8", render_error(e));
}

}  // namespace

std::string handle_uri(const std::string& handle_text) { return "https://hdl.handle.net/" + handle_text; }

std::string bearer_token(const http::Request& request) {
  const auto value = request.header("Authorization");
  constexpr std::string_view scheme = "Bearer ";
  if (value.size() < scheme.size() || to_lower(value.substr(0, scheme.size())) != "bearer ") return {};
  return std::string(trim(std::string_view(value).substr(scheme.size())));
}

SwordServer::SwordServer(store::Store& store, pid::PidService& pids, SwordConfig config)
    : store_(store), pids_(pids), config_(std::move(config)) {}

void SwordServer::authorize(const std::string& auth_token) const {
  if (config_.deposit_token.empty() || !equal_constant_time(auth_token, config_.deposit_token))
    throw Error(ErrorCode::Unauthorized, "missing or wrong deposit token");
}

ServiceDocument SwordServer::service_document(const std::string& auth_token) const {
  authorize(auth_token);
  ServiceDocument doc;
  doc.max_upload_bytes = config_.max_upload_bytes;
  doc.workspace_title = store_.node_name();
  for (const auto& c : store_.collections()) {
    if (c.kind != store::CollectionKind::Local) continue;
    doc.collections.push_back(ServiceCollection{config_.base_url + std::string(kDepositPath) + c.id, c.name,
                                                {std::string(kPackaging)}, {std::string(kZipMediaType)}});
  }
  return doc;
}

DepositReceipt SwordServer::deposit(const std::string& collection_id, const DepositPackage& package,
                                    const std::string& auth_token) {
  authorize(auth_token);
  const auto collection = store_.find_collection(collection_id);
  if (!collection) throw Error(ErrorCode::UnknownCollection, "no collection '" + collection_id + "'", collection_id);
  if (collection->kind != store::CollectionKind::Local)
    throw Error(ErrorCode::MirrorCollection, "collection '" + collection_id + "' is a mirror", collection_id);
  if (package.packaging != kPackaging)
    throw Error(ErrorCode::UnsupportedPackaging, "packaging '" + package.packaging + "' is not supported",
                package.packaging);
  if (package.bytes.size() > config_.max_upload_bytes)
    throw Error(ErrorCode::PackageTooLarge, "package exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
  if (package.declared_md5) {
    const auto actual = md5_hex(package.bytes);
    if (to_lower(*package.declared_md5) != actual)
      throw Error(ErrorCode::ChecksumMismatch, "declared MD5 " + *package.declared_md5 + " but package is " + actual);
  }

  const auto entries = zip::read_archive(package.bytes, config_.max_upload_bytes * 4);
  auto item = saf::parse_archive(entries);

  const auto uuid = generate_uuid();
  const auto location = config_.base_url + "/items/" + uuid;

  // Validate with a placeholder handle so a PID is only minted for a record
  // that will be accepted.
  auto record = item.record;
  record.add(metadata::kPidFieldKey, handle_uri(pids_.prefix() + "/placeholder"));
  const auto report = metadata::validate_record(record, store_.profile());
  if (!report.ok) throw metadata::ValidationRejected(report);

  std::optional<std::string> suffix;
  if (package.slug && pid::is_suffix_segment(*package.slug)) suffix = *package.slug;
  pid::Handle handle;
  std::vector<pid::HandleValue> values{pid::HandleValue{0, "URL", location, {}}};
  try {
    handle = pids_.mint(suffix, values);
  } catch (const Error& e) {
    if (!suffix || e.code() != ErrorCode::SuffixTaken) throw;
    handle = pids_.mint(std::nullopt, values);
  }

  record = item.record;
  record.add(metadata::kPidFieldKey, handle_uri(handle.text()));
  std::vector<store::FileInput> files;
  for (auto& f : item.files) files.push_back(store::FileInput{f.name, std::move(f.bytes), {}});
  store::Item created;
  try {
    store::CreateOptions options;
    options.uuid = uuid;
    created = store_.create_item(collection_id, std::move(record), std::move(files), options);
  } catch (...) {
    try {
      pids_.remove(handle.text());
    } catch (const std::exception&) {
    }
    throw;
  }

  DepositReceipt receipt;
  receipt.item_uuid = created.uuid;
  receipt.oai_identifier = oaipmh::OaiIdentifier{store_.node_name(), created.uuid}.text();
  receipt.pid = handle.text();
  receipt.treatment = "Stored as item " + created.uuid + " in collection " + collection_id + " with " +
                      std::to_string(created.bitstreams.size()) + " bitstream(s); handle " + handle.text() +
                      " minted.";
  receipt.location = location;
  receipt.updated = created.datestamp;
  return receipt;
}

http::Response SwordServer::handle_http(const http::Request& request) {
  try {
    if (request.path == kServicePath) {
      if (request.method != "GET") return http::text_response(405, "text/plain", "method not allowed\n");
      return http::text_response(200, "application/atomsvc+xml; charset=UTF-8",
                                 render_service_document(service_document(bearer_token(request))));
    }
    if (request.path.starts_with(kDepositPath)) {
      if (request.method != "POST") return http::text_response(405, "text/plain", "method not allowed\n");
      const auto collection = request.path.substr(kDepositPath.size());
      DepositPackage package;
      package.bytes = request.body;
      const auto packaging = request.header("X-Packaging");
      if (!packaging.empty()) package.packaging = packaging;
      if (auto md5 = request.header("Content-MD5"); !md5.empty()) package.declared_md5 = md5;
      if (auto slug = request.header("Slug"); !slug.empty()) package.slug = slug;
      const auto receipt = deposit(collection, package, bearer_token(request));
      auto response = http::text_response(201, "application/atom+xml; charset=UTF-8", render_receipt(receipt));
      response.headers["Location"] = receipt.location;
      return response;
    }
    return http::text_response(404, "text/plain", "not found\n");
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(Error(ErrorCode::StorageError, e.what()));
  }
}

}  // namespace lago::sword
