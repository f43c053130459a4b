#include "lago/oaipmh/harvester.hpp"

#include "lago/common/error.hpp"

namespace lago::oaipmh {

namespace {

struct TokenRejected {};

[[noreturn]] void unexpected(const Response& r) {
  const auto& e = r.errors.front();
  throw Error(ErrorCode::ProtocolError, "unexpected OAI error " + std::string(to_string(e.code)) + ": " + e.message,
              "OAI-PMH/error");
}

HarvestReport harvest_pass(http::Transport& transport, Clock& clock, const HarvestOptions& options,
                           const RecordCallback& on_record) {
  HarvestReport report;
  http::QueryParams params{{"verb", "ListRecords"}, {"metadataPrefix", options.metadata_prefix}};
  if (options.from) params.emplace_back("from", format_datestamp(*options.from));
  if (options.until) params.emplace_back("until", format_datestamp(*options.until));
  if (options.set) params.emplace_back("set", *options.set);

  for (;;) {
    const bool first = report.pages == 0;
    auto response = oai_request(transport, clock, options.base_url, params, options.retry);
    ++report.pages;
    if (first) report.response_date = response.response_date;
    if (response.is_error()) {
      if (first && response.errors.size() == 1 && response.has_error(OaiErrorCode::NoRecordsMatch)) return report;
      if (!first && response.has_error(OaiErrorCode::BadResumptionToken)) throw TokenRejected{};
      unexpected(response);
    }
    auto* page = std::get_if<ListRecordsPayload>(&response.payload);
    if (!page) throw Error(ErrorCode::ProtocolError, "response is not ListRecords", "OAI-PMH/ListRecords");
    for (const auto& record : page->records) {
      ++report.received;
      if (record.header.deleted) ++report.deleted;
      if (!report.max_datestamp || record.header.datestamp > *report.max_datestamp)
        report.max_datestamp = record.header.datestamp;
      on_record(record);
    }
    if (!page->token || page->token->value.empty()) return report;
    params = {{"verb", "ListRecords"}, {"resumptionToken", page->token->value}};
  }
}

}  // namespace

Response oai_request(http::Transport& transport, Clock& clock, const std::string& base_url,
                     const http::QueryParams& params, const http::RetryPolicy& retry) {
  http::Request request;
  request.method = "GET";
  request.path = "";
  request.query = params;
  const auto response = http::send_with_retry(transport, clock, base_url, request, retry);
  if (response.status != 200)
    throw Error(ErrorCode::ProtocolError, "OAI endpoint answered HTTP " + std::to_string(response.status), base_url);
  return parse_oai_response(response.body);
}

HarvestReport harvest(http::Transport& transport, Clock& clock, const HarvestOptions& options,
                      const RecordCallback& on_record) {
  try {
    return harvest_pass(transport, clock, options, on_record);
  } catch (const TokenRejected&) {
  }
  try {
    auto report = harvest_pass(transport, clock, options, on_record);
    report.restarts = 1;
    return report;
  } catch (const TokenRejected&) {
    throw Error(ErrorCode::ProtocolError, "resumption token rejected twice", "OAI-PMH/error");
  }
}

std::optional<Timestamp> advance_checkpoint(std::optional<Timestamp> previous, const HarvestReport& report) {
  if (!report.response_date) return previous;
  const auto horizon = *report.response_date - std::chrono::seconds{1};
  if (previous && *previous >= horizon) return previous;
  return horizon;
}

IdentifyInfo fetch_identify(http::Transport& transport, Clock& clock, const std::string& base_url,
                            const http::RetryPolicy& retry) {
  auto response = oai_request(transport, clock, base_url, {{"verb", "Identify"}}, retry);
  if (response.is_error()) unexpected(response);
  auto* info = std::get_if<IdentifyInfo>(&response.payload);
  if (!info) throw Error(ErrorCode::ProtocolError, "response is not Identify", "OAI-PMH/Identify");
  return *info;
}

std::vector<SetInfo> fetch_sets(http::Transport& transport, Clock& clock, const std::string& base_url,
                                const http::RetryPolicy& retry) {
  auto response = oai_request(transport, clock, base_url, {{"verb", "ListSets"}}, retry);
  if (response.is_error()) {
    if (response.has_error(OaiErrorCode::NoSetHierarchy)) return {};
    unexpected(response);
  }
  auto* sets = std::get_if<ListSetsPayload>(&response.payload);
  if (!sets) throw Error(ErrorCode::ProtocolError, "response is not ListSets", "OAI-PMH/ListSets");
  return sets->sets;
}

}  // namespace lago::oaipmh
