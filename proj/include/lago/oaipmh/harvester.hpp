#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lago/common/clock.hpp"
#include "lago/http/http.hpp"
#include "lago/oaipmh/model.hpp"

namespace lago::oaipmh {

struct HarvestOptions {
  // OAI endpoint, e.g. http://host:port/oai
  std::string base_url;
  std::string metadata_prefix = "lago";
  std::optional<Timestamp> from;
  std::optional<Timestamp> until;
  std::optional<std::string> set;
  http::RetryPolicy retry;
};

struct HarvestReport {
  std::size_t received = 0;
  std::size_t deleted = 0;
  std::size_t pages = 0;
  // Largest record datestamp seen.
  std::optional<Timestamp> max_datestamp;
  // responseDate of the first page of the successful pass.
  std::optional<Timestamp> response_date;
  std::size_t restarts = 0;
};

using RecordCallback = std::function<void(const Record&)>;

// ListRecords to exhaustion. A badResumptionToken mid-stream restarts the whole
// harvest once; records of the abandoned pass may have been delivered already.
HarvestReport harvest(http::Transport& transport, Clock& clock, const HarvestOptions& options,
                      const RecordCallback& on_record);

// Checkpoint after a successful harvest: every record stamped at or before it
// has been delivered. Records stamped in the responseDate second may still be
// arriving at the provider, so it stops one second short of responseDate and
// never moves backwards. The next harvest uses from = checkpoint + 1s.
std::optional<Timestamp> advance_checkpoint(std::optional<Timestamp> previous, const HarvestReport& report);

// One verb request, parsed; OAI errors are returned in the response.
Response oai_request(http::Transport& transport, Clock& clock, const std::string& base_url,
                     const http::QueryParams& params, const http::RetryPolicy& retry = {});

IdentifyInfo fetch_identify(http::Transport& transport, Clock& clock, const std::string& base_url,
                            const http::RetryPolicy& retry = {});
// Empty when the repository reports noSetHierarchy.
std::vector<SetInfo> fetch_sets(http::Transport& transport, Clock& clock, const std::string& base_url,
                                const http::RetryPolicy& retry = {});

}  // namespace lago::oaipmh
