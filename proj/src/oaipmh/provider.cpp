#include "lago/oaipmh/provider.hpp"

#include <map>
#include <set>

#include "lago/common/error.hpp"
#include "lago/metadata/serialize.hpp"
#include "lago/oaipmh/identifier.hpp"

namespace lago::oaipmh {

namespace {

struct OaiFailure {
  OaiErrorCode code;
  std::string message;
};

[[noreturn]] void fail(OaiErrorCode code, std::string message) { throw OaiFailure{code, std::move(message)}; }

const std::map<Verb, std::set<std::string>>& allowed_arguments() {
  static const std::map<Verb, std::set<std::string>> allowed{
      {Verb::Identify, {}},
      {Verb::ListMetadataFormats, {"identifier"}},
      {Verb::ListSets, {"resumptionToken"}},
      {Verb::ListIdentifiers, {"metadataPrefix", "from", "until", "set", "resumptionToken"}},
      {Verb::ListRecords, {"metadataPrefix", "from", "until", "set", "resumptionToken"}},
      {Verb::GetRecord, {"identifier", "metadataPrefix"}},
  };
  return allowed;
}

bool known_prefix(std::string_view p) { return p == kOaiDcPrefix || p == kLagoPrefix; }

}  // namespace

xml::Element metadata_payload(const store::Item& item, std::string_view prefix) {
  if (prefix == kOaiDcPrefix) return metadata::to_oai_dc(item.metadata);
  metadata::LagoDocument doc{item.metadata, item.provenance, {}};
  for (const auto& b : item.bitstreams) doc.bitstreams.push_back(b.ref());
  return metadata::to_lago(doc);
}

Provider::Provider(const store::Store& store, ProviderConfig config, TokenCodec tokens)
    : store_(store), config_(std::move(config)), tokens_(std::move(tokens)) {
  if (config_.page_size == 0) config_.page_size = 1;
}

IdentifyInfo Provider::identify() const {
  IdentifyInfo info;
  info.repository_name = config_.repository_name;
  info.base_url = config_.base_url;
  info.admin_emails = {config_.admin_email};
  info.earliest_datestamp = store_.earliest_datestamp().value_or(store_.clock().now_seconds());
  return info;
}

Header Provider::make_header(const store::Item& item) const {
  Header h;
  h.identifier = OaiIdentifier{store_.node_name(), item.uuid}.text();
  h.datestamp = item.datestamp;
  h.deleted = item.deleted();
  if (auto c = store_.find_collection(item.collection)) h.set_specs.push_back(c->set_spec());
  return h;
}

Record Provider::make_record(const store::Item& item, std::string_view prefix, bool with_metadata) const {
  Record r;
  r.header = make_header(item);
  if (with_metadata && !item.deleted()) r.metadata = metadata_payload(item, prefix);
  return r;
}

void Provider::list(Verb verb, const http::QueryParams& params, Response& out) const {
  std::map<std::string, std::string> args(params.begin(), params.end());
  const auto now = store_.clock().now_seconds();

  TokenState state;
  const bool resumed = args.count("resumptionToken") > 0;
  if (resumed) {
    auto decoded = tokens_.decode(args["resumptionToken"]);
    if (!decoded) fail(OaiErrorCode::BadResumptionToken, "resumption token failed verification");
    if (decoded->verb != verb) fail(OaiErrorCode::BadResumptionToken, "resumption token belongs to another verb");
    if (decoded->expires < now) fail(OaiErrorCode::BadResumptionToken, "resumption token expired");
    state = *decoded;
  } else {
    state.verb = verb;
    state.metadata_prefix = args["metadataPrefix"];
    std::optional<OaiDate> from, until;
    if (args.count("from")) {
      from = parse_oai_date(args["from"]);
      if (!from) fail(OaiErrorCode::BadArgument, "from is not a valid UTC date");
      state.from = from->value;
    }
    if (args.count("until")) {
      until = parse_oai_date(args["until"]);
      if (!until) fail(OaiErrorCode::BadArgument, "until is not a valid UTC date");
      state.until = until->day_granularity ? until->value + std::chrono::seconds{86399} : until->value;
    }
    if (from && until && from->day_granularity != until->day_granularity)
      fail(OaiErrorCode::BadArgument, "from and until have different granularities");
    if (state.from && state.until && *state.from > *state.until)
      fail(OaiErrorCode::BadArgument, "from is later than until");
    if (!known_prefix(state.metadata_prefix))
      fail(OaiErrorCode::CannotDisseminateFormat, "metadataPrefix '" + state.metadata_prefix + "' is not supported");
    if (args.count("set")) state.set = args["set"];
  }

  store::ListQuery query{state.from, state.until, std::nullopt};
  if (state.set) {
    const auto colon = state.set->find(':');
    std::optional<store::Collection> c;
    if (colon != std::string::npos) c = store_.find_collection(state.set->substr(colon + 1));
    if (!c || c->set_spec() != *state.set) fail(OaiErrorCode::NoRecordsMatch, "no such set '" + *state.set + "'");
    query.collection = c->id;
  }

  std::optional<store::ItemKey> after;
  if (resumed) after = state.last;
  auto page = store_.list_items_after(query, after, config_.page_size + 1);
  if (page.items.empty()) fail(OaiErrorCode::NoRecordsMatch, "the combination of arguments matches no records");

  const bool more = page.items.size() > config_.page_size;
  if (more) page.items.resize(config_.page_size);

  std::optional<ResumptionToken> token;
  if (more || resumed) {
    token = ResumptionToken{};
    token->complete_list_size = page.total;
    token->cursor = state.cursor;
    if (more) {
      TokenState next = state;
      next.cursor = state.cursor + page.items.size();
      next.last = store::ItemKey{page.items.back().datestamp, page.items.back().uuid};
      next.issued = now;
      next.expires = now + config_.token_ttl;
      token->value = tokens_.encode(next);
      token->expiration = next.expires;
    }
  }

  if (verb == Verb::ListIdentifiers) {
    ListIdentifiersPayload p;
    for (const auto& item : page.items) p.headers.push_back(make_header(item));
    p.token = std::move(token);
    out.payload = std::move(p);
  } else {
    ListRecordsPayload p;
    for (const auto& item : page.items) p.records.push_back(make_record(item, state.metadata_prefix, true));
    p.token = std::move(token);
    out.payload = std::move(p);
  }
}

Response Provider::dispatch(const http::QueryParams& params, Response& out) const {
  for (const auto& [k, v] : params)
    if (!xml::is_xml_text(k) || !xml::is_xml_text(v))
      fail(OaiErrorCode::BadArgument, "arguments must be UTF-8 text without control characters");
  std::map<std::string, int> counts;
  for (const auto& [k, v] : params) ++counts[k];

  if (counts["verb"] == 0) fail(OaiErrorCode::BadVerb, "verb argument is missing");
  if (counts["verb"] > 1) fail(OaiErrorCode::BadVerb, "verb argument is repeated");
  std::string verb_text;
  for (const auto& [k, v] : params)
    if (k == "verb") verb_text = v;
  const auto verb = parse_verb(verb_text);
  if (!verb) fail(OaiErrorCode::BadVerb, "'" + verb_text + "' is not an OAI-PMH verb");

  const auto& allowed = allowed_arguments().at(*verb);
  for (const auto& [k, n] : counts) {
    if (k == "verb" || n == 0) continue;
    if (!allowed.count(k)) fail(OaiErrorCode::BadArgument, "argument '" + k + "' is not allowed for " + verb_text);
    if (n > 1) fail(OaiErrorCode::BadArgument, "argument '" + k + "' is repeated");
  }
  const auto has = [&](const char* k) { return counts.count(k) && counts[k] > 0; };
  if (has("resumptionToken") && params.size() != 2)
    fail(OaiErrorCode::BadArgument, "resumptionToken is an exclusive argument");

  std::map<std::string, std::string> args(params.begin(), params.end());
  // Echo the arguments now that they are known to be legal.
  out.request_arguments = params;

  switch (*verb) {
    case Verb::Identify:
      out.payload = identify();
      break;
    case Verb::ListMetadataFormats: {
      if (has("identifier")) {
        auto id = OaiIdentifier::parse(args["identifier"]);
        if (!id || id->node != store_.node_name() || !store_.find_item(id->uuid))
          fail(OaiErrorCode::IdDoesNotExist, "unknown identifier '" + args["identifier"] + "'");
      }
      out.payload = ListMetadataFormatsPayload{{
          MetadataFormat{std::string(kOaiDcPrefix), std::string(metadata::kOaiDcSchema),
                         std::string(metadata::kOaiDcNamespace)},
          MetadataFormat{std::string(kLagoPrefix), std::string(metadata::kLagoNamespace) + ":lago.xsd",
                         std::string(metadata::kLagoNamespace)},
      }};
      break;
    }
    case Verb::ListSets: {
      if (has("resumptionToken")) fail(OaiErrorCode::BadResumptionToken, "set lists are never paginated");
      ListSetsPayload p;
      for (const auto& c : store_.collections()) p.sets.push_back(SetInfo{c.set_spec(), c.name});
      if (p.sets.empty()) fail(OaiErrorCode::NoSetHierarchy, "this repository has no collections");
      out.payload = std::move(p);
      break;
    }
    case Verb::ListIdentifiers:
    case Verb::ListRecords:
      if (!has("resumptionToken") && !has("metadataPrefix"))
        fail(OaiErrorCode::BadArgument, "metadataPrefix is required");
      list(*verb, params, out);
      break;
    case Verb::GetRecord: {
      if (!has("identifier") || !has("metadataPrefix"))
        fail(OaiErrorCode::BadArgument, "GetRecord requires identifier and metadataPrefix");
      const auto id = OaiIdentifier::parse(args["identifier"]);
      std::optional<store::Item> item;
      if (id && id->node == store_.node_name()) item = store_.find_item(id->uuid);
      if (!item) fail(OaiErrorCode::IdDoesNotExist, "unknown identifier '" + args["identifier"] + "'");
      if (!known_prefix(args["metadataPrefix"]))
        fail(OaiErrorCode::CannotDisseminateFormat, "metadataPrefix '" + args["metadataPrefix"] + "' is not supported");
      out.payload = GetRecordPayload{make_record(*item, args["metadataPrefix"], true)};
      break;
    }
  }
  return out;
}

Response Provider::respond(const http::QueryParams& params) const {
  Response out;
  out.response_date = store_.clock().now_seconds();
  out.request_url = config_.base_url;
  try {
    return dispatch(params, out);
  } catch (const OaiFailure& f) {
    // badVerb and badArgument responses must not echo the arguments.
    if (f.code == OaiErrorCode::BadVerb || f.code == OaiErrorCode::BadArgument) out.request_arguments.clear();
    out.payload = std::monostate{};
    out.errors = {OaiError{f.code, f.message}};
  } catch (const std::exception& e) {
    out.request_arguments.clear();
    out.payload = std::monostate{};
    out.errors = {OaiError{OaiErrorCode::BadArgument, std::string("request could not be processed: ") + e.what()}};
  }
  return out;
}

std::string Provider::handle(const http::QueryParams& params) const { return render_oai_response(respond(params)); }

http::Response Provider::handle_http(const http::Request& request) const {
  http::QueryParams params = request.query;
  if (request.method == "POST" && params.empty() && !request.body.empty()) params = http::parse_query(request.body);
  return http::text_response(200, "text/xml; charset=UTF-8", handle(params));
}

}  // namespace lago::oaipmh
