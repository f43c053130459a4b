#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lago/common/error.hpp"
#include "lago/oaipmh/harvester.hpp"
#include "lago/oaipmh/identifier.hpp"
#include "lago/oaipmh/provider.hpp"
#include "lago/xml/xml.hpp"
#include "support.hpp"

using namespace lago;
using namespace lago::oaipmh;
using namespace std::chrono_literals;
using testing::valid_record;

namespace {

constexpr const char* kBase = "http://p.test/oai";

struct Fixture {
  testing::TempDir dir;
  FakeClock clock;
  store::Store store{dir.path(), "nodeA", metadata::LagoProfile::builtin(), clock, {.durable = false}};
  Provider provider;
  http::LoopbackTransport net;

  explicit Fixture(std::size_t page_size = 100)
      : provider(store, {"nodeA", kBase, "admin@nodea.test", page_size, 3600s}, TokenCodec("secret")) {
    store.add_community({"site", "Site"});
    store.add_collection({"data", "Data", "site", store::CollectionKind::Local, {}});
    store.add_collection({"sims", "Simulations", "site", store::CollectionKind::Local, {}});
    store.add_collection({"empty", "Empty", "site", store::CollectionKind::Local, {}});
    store.add_collection({"nodeB", "Mirror of nodeB", "mirrors", store::CollectionKind::Mirror, std::string("nodeB")});
    net.attach("http://p.test", [this](const http::Request& r) { return provider.handle_http(r); });
  }

  std::vector<store::Item> seed(std::size_t n, const std::string& collection = "data") {
    std::vector<store::Item> out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(store.create_item(collection, valid_record(i), {{"f.dat", "x" + std::to_string(i), ""}}));
      if (i % 37 == 0) clock.advance(1s);
    }
    return out;
  }

  std::string raw(const http::QueryParams& q) const { return provider.handle(q); }
  Response ask(const http::QueryParams& q) const { return parse_oai_response(raw(q)); }
};

// Independent oracle: identifiers by walking the store directly.
std::vector<std::string> store_identifiers(const store::Store& s, const store::ListQuery& q) {
  std::vector<std::string> out;
  const auto page = s.list_items(q, 0, 1000000);
  for (const auto& it : page.items) out.push_back("oai:" + s.node_name() + ":" + it.uuid);
  return out;
}

std::vector<std::string> error_codes(const std::string& xml) {
  std::vector<std::string> out;
  const auto root = xml::parse(xml);
  for (const auto* e : root.children_named("error")) out.push_back(*e->attribute("code"));
  return out;
}

void check_valid(const std::string& xml) {
  const auto problems = testing::oai_schema_problems(xml);
  if (!problems.empty()) FAIL_CHECK(problems.front() << "\n" << xml.substr(0, 2000));
}

}  // namespace

TEST_CASE("identifier format and parse are inverses") {
  const OaiIdentifier id{"nodeA", "0f8fad5b-d9cb-469f-a165-70867728950e"};
  CHECK(id.text() == "oai:nodeA:0f8fad5b-d9cb-469f-a165-70867728950e");
  CHECK(OaiIdentifier::parse(id.text()) == id);
  for (const char* bad : {"", "oai:nodeA", "oai::x", "urn:nodeA:x", "oai:nodeA:not-a-uuid", "oai:a b:x"})
    CHECK_FALSE(OaiIdentifier::parse(bad).has_value());
}

TEST_CASE("Identify") {
  Fixture f;
  f.seed(3);
  const auto xml = f.raw({{"verb", "Identify"}});
  check_valid(xml);
  const auto r = parse_oai_response(xml);
  const auto& info = std::get<IdentifyInfo>(r.payload);
  CHECK(info.repository_name == "nodeA");
  CHECK(info.protocol_version == "2.0");
  CHECK(info.granularity == "YYYY-MM-DDThh:mm:ssZ");
  CHECK(info.deleted_record == "persistent");
  CHECK(info.base_url == kBase);
  CHECK(info.earliest_datestamp == *f.store.earliest_datestamp());
  CHECK(r.request_url == kBase);
  CHECK(r.request_arguments == http::QueryParams{{"verb", "Identify"}});
  CHECK(f.ask({{"verb", "Identify"}, {"x", "1"}}).has_error(OaiErrorCode::BadArgument));
}

TEST_CASE("ListMetadataFormats and ListSets") {
  Fixture f;
  const auto items = f.seed(2);
  auto xml = f.raw({{"verb", "ListMetadataFormats"}});
  check_valid(xml);
  const auto formats = std::get<ListMetadataFormatsPayload>(parse_oai_response(xml).payload).formats;
  std::set<std::string> prefixes;
  for (const auto& m : formats) prefixes.insert(m.prefix);
  CHECK(prefixes == std::set<std::string>{"oai_dc", "lago"});
  CHECK(f.ask({{"verb", "ListMetadataFormats"}, {"identifier", "oai:nodeA:" + items[0].uuid}}).errors.empty());
  CHECK(f.ask({{"verb", "ListMetadataFormats"}, {"identifier", "oai:nodeA:00000000-0000-4000-8000-000000000000"}})
            .has_error(OaiErrorCode::IdDoesNotExist));

  xml = f.raw({{"verb", "ListSets"}});
  check_valid(xml);
  const auto sets = std::get<ListSetsPayload>(parse_oai_response(xml).payload).sets;
  std::set<std::string> specs;
  for (const auto& s : sets) specs.insert(s.spec);
  CHECK(specs == std::set<std::string>{"local:data", "local:sims", "local:empty", "mirror:nodeB"});
  CHECK(sets.size() == 4);
  CHECK(f.ask({{"verb", "ListSets"}, {"resumptionToken", "abc"}}).has_error(OaiErrorCode::BadResumptionToken));
}

TEST_CASE("GetRecord in both formats and for tombstones") {
  Fixture f;
  const auto items = f.seed(2);
  const auto id = "oai:nodeA:" + items[0].uuid;
  for (const char* prefix : {"oai_dc", "lago"}) {
    const auto xml = f.raw({{"verb", "GetRecord"}, {"identifier", id}, {"metadataPrefix", prefix}});
    check_valid(xml);
    const auto rec = std::get<GetRecordPayload>(parse_oai_response(xml).payload).record;
    CHECK(rec.header.identifier == id);
    CHECK(rec.header.set_specs == std::vector<std::string>{"local:data"});
    REQUIRE(rec.metadata.has_value());
    CHECK(rec.metadata->local_name() == (std::string(prefix) == "lago" ? "lago" : "dc"));
  }
  const auto lago = std::get<GetRecordPayload>(
      f.ask({{"verb", "GetRecord"}, {"identifier", id}, {"metadataPrefix", "lago"}}).payload);
  const auto doc = metadata::parse_lago_document(*lago.record.metadata);
  CHECK(doc.record == items[0].metadata);
  CHECK(doc.provenance->node_name == "nodeA");
  REQUIRE(doc.bitstreams.size() == 1);
  CHECK(doc.bitstreams[0].md5 == items[0].bitstreams[0].md5);

  f.clock.advance(1s);
  f.store.soft_delete_item(items[1].uuid);
  const auto xml = f.raw({{"verb", "GetRecord"}, {"identifier", "oai:nodeA:" + items[1].uuid}, {"metadataPrefix", "oai_dc"}});
  check_valid(xml);
  const auto dead = std::get<GetRecordPayload>(parse_oai_response(xml).payload).record;
  CHECK(dead.header.deleted);
  CHECK_FALSE(dead.metadata.has_value());
  CHECK(xml.find("status=\"deleted\"") != std::string::npos);

  CHECK(error_codes(f.raw({{"verb", "GetRecord"}, {"identifier", "oai:nodeA:00000000-0000-4000-8000-000000000000"},
                          {"metadataPrefix", "oai_dc"}})) == std::vector<std::string>{"idDoesNotExist"});
  CHECK(error_codes(f.raw({{"verb", "GetRecord"}, {"identifier", "oai:nodeZ:" + items[0].uuid},
                          {"metadataPrefix", "oai_dc"}})) == std::vector<std::string>{"idDoesNotExist"});
  CHECK(error_codes(f.raw({{"verb", "GetRecord"}, {"identifier", id}, {"metadataPrefix", "marc"}})) ==
        std::vector<std::string>{"cannotDisseminateFormat"});
  CHECK(error_codes(f.raw({{"verb", "GetRecord"}, {"identifier", id}})) == std::vector<std::string>{"badArgument"});
}

TEST_CASE("argument errors") {
  Fixture f;
  f.seed(3);
  const auto one = [&](const http::QueryParams& q) {
    const auto xml = f.raw(q);
    check_valid(xml);
    const auto codes = error_codes(xml);
    return codes.size() == 1 ? codes[0] : std::string("<") + std::to_string(codes.size()) + ">";
  };
  CHECK(one({}) == "badVerb");
  CHECK(one({{"verb", "Explode"}}) == "badVerb");
  CHECK(one({{"verb", "Identify"}, {"verb", "Identify"}}) == "badVerb");
  CHECK(one({{"verb", "ListRecords"}}) == "badArgument");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"metadataPrefix", "oai_dc"}}) == "badArgument");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "yesterday"}}) == "badArgument");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "2024-01-01"},
             {"until", "2024-01-01T00:00:00Z"}}) == "badArgument");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "2024-02-01"}, {"until", "2024-01-01"}}) ==
        "badArgument");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"from", "2030-01-01"}}) == "noRecordsMatch");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"set", "local:nope"}}) == "noRecordsMatch");
  CHECK(one({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"set", "local:empty"}}) == "noRecordsMatch");
  CHECK(one({{"verb", "ListIdentifiers"}, {"metadataPrefix", "bogus"}}) == "cannotDisseminateFormat");
  CHECK(one({{"verb", "ListRecords"}, {"resumptionToken", "x"}, {"metadataPrefix", "oai_dc"}}) == "badArgument");
  CHECK(one({{"verb", "ListRecords"}, {"resumptionToken", "garbage"}}) == "badResumptionToken");

  // badVerb and badArgument responses echo no request attributes.
  const auto r = f.ask({{"verb", "Explode"}, {"x", "y"}});
  CHECK(r.request_arguments.empty());

  // Day granularity until covers the whole day.
  const auto today = format_date(f.clock.now_seconds());
  const auto all = f.ask({{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}, {"until", today}});
  CHECK(std::get<ListIdentifiersPayload>(all.payload).headers.size() == 3);
}

TEST_CASE("1000 items paginate into exactly 10 pages") {
  Fixture f;
  f.seed(1000);
  const auto oracle = store_identifiers(f.store, {});
  REQUIRE(oracle.size() == 1000);

  std::vector<std::string> seen;
  http::QueryParams q{{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}};
  std::size_t pages = 0;
  for (;;) {
    const auto xml = f.raw(q);
    check_valid(xml);
    ++pages;
    const auto root = xml::parse(xml);
    const auto* list = root.child("ListRecords");
    REQUIRE(list);
    for (const auto* rec : list->children_named("record")) seen.push_back(rec->child("header")->child("identifier")->text);
    const auto* tok = list->child("resumptionToken");
    REQUIRE(tok);
    CHECK(*tok->attribute("completeListSize") == "1000");
    CHECK(*tok->attribute("cursor") == std::to_string((pages - 1) * 100));
    if (tok->text.empty()) break;
    CHECK(pages < 10);
    q = {{"verb", "ListRecords"}, {"resumptionToken", tok->text}};
    REQUIRE(pages < 20);
  }
  CHECK(pages == 10);
  CHECK(seen == oracle);
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 1000);

  const auto report = harvest(f.net, f.clock, {kBase, "oai_dc"}, [](const Record&) {});
  CHECK(report.received == 1000);
  CHECK(report.pages == 10);
}

TEST_CASE("pagination completeness over random sizes") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 12; ++round) {
    const std::size_t p = 1 + rng() % 40;
    Fixture f(p);
    const std::size_t n = rng() % 150;
    f.seed(n);
    std::vector<std::string> ids;
    const auto report = harvest(f.net, f.clock, {kBase, "lago"}, [&](const Record& r) { ids.push_back(r.header.identifier); });
    CHECK(report.received == n);
    CHECK(ids == store_identifiers(f.store, {}));
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == n);
    CHECK(report.pages == std::max<std::size_t>(1, (n + p - 1) / p));
  }
}

TEST_CASE("selective harvest by set and window") {
  Fixture f(7);
  f.seed(20, "data");
  f.clock.advance(10s);
  const auto mid = f.clock.now_seconds();
  f.seed(15, "sims");
  std::size_t sims = 0;
  harvest(f.net, f.clock, {kBase, "lago", {}, {}, std::string("local:sims")}, [&](const Record& r) {
    CHECK(r.header.set_specs == std::vector<std::string>{"local:sims"});
    ++sims;
  });
  CHECK(sims == 15);
  const auto later = harvest(f.net, f.clock, {kBase, "lago", mid}, [](const Record&) {});
  CHECK(later.received == store_identifiers(f.store, {mid, {}, {}}).size());
  const auto earlier = harvest(f.net, f.clock, {kBase, "lago", {}, mid - 1s}, [](const Record&) {});
  CHECK(earlier.received + later.received == 35);
}

TEST_CASE("harvest of an empty set is one page and no error") {
  Fixture f;
  f.seed(5);
  const auto r = harvest(f.net, f.clock, {kBase, "lago", {}, {}, std::string("local:empty")}, [](const Record&) {});
  CHECK(r.received == 0);
  CHECK(r.deleted == 0);
  CHECK(r.pages == 1);
  const auto future = harvest(f.net, f.clock, {kBase, "lago", *parse_datestamp("2030-01-01T00:00:00Z")}, [](const Record&) {});
  CHECK(future.received == 0);
}

TEST_CASE("incremental harvest returns exactly the changed records") {
  Fixture f(10);
  const auto items = f.seed(60);
  f.clock.advance(2s);
  const auto first = harvest(f.net, f.clock, {kBase, "lago"}, [](const Record&) {});
  CHECK(first.received == 60);
  auto checkpoint = advance_checkpoint(std::nullopt, first);
  REQUIRE(checkpoint);
  f.clock.advance(5s);
  std::set<std::string> changed;
  for (int i = 0; i < 7; ++i) {
    f.store.update_item(items[i * 5].uuid, valid_record(500 + i));
    changed.insert("oai:nodeA:" + items[i * 5].uuid);
  }
  std::set<std::string> got;
  const auto second = harvest(f.net, f.clock, {kBase, "lago", *checkpoint + 1s}, [&](const Record& r) { got.insert(r.header.identifier); });
  CHECK(second.received == 7);
  CHECK(got == changed);
}

TEST_CASE("incremental harvest soundness under interleaved updates") {
  std::mt19937_64 rng(31);
  Fixture f(6);
  auto items = f.seed(40);
  std::optional<Timestamp> checkpoint;
  std::map<std::string, Timestamp> stamp;
  for (const auto& it : f.store.all_items()) stamp["oai:nodeA:" + it.uuid] = it.datestamp;
  std::set<std::string> pending;
  for (const auto& [id, _] : stamp) pending.insert(id);
  for (int round = 0; round < 15; ++round) {
    f.clock.advance(std::chrono::milliseconds(rng() % 2500));
    std::set<std::string> got;
    HarvestOptions o{kBase, "lago"};
    if (checkpoint) o.from = *checkpoint + 1s;
    const auto rep = harvest(f.net, f.clock, o, [&](const Record& r) { got.insert(r.header.identifier); });
    // Everything changed since the last checkpoint, excluding records in the
    // horizon second, must arrive; nothing stamped at or before it may.
    const auto next = advance_checkpoint(checkpoint, rep);
    for (const auto& id : pending)
      if (stamp[id] <= *next) CHECK_MESSAGE(got.count(id) == 1, id);
    for (const auto& id : got) {
      if (checkpoint) CHECK(stamp[id] > *checkpoint);
    }
    std::set<std::string> still;
    for (const auto& id : pending)
      if (stamp[id] > *next) still.insert(id);
    pending = still;
    checkpoint = next;
    // Random interleaved changes, some in the same second as the harvest.
    for (int k = rng() % 6; k > 0; --k) {
      const auto& it = items[rng() % items.size()];
      const auto updated = rng() % 4 == 0 ? f.store.soft_delete_item(it.uuid) : f.store.update_item(it.uuid, valid_record(rng() % 100));
      const auto id = "oai:nodeA:" + it.uuid;
      if (updated.datestamp != stamp[id]) pending.insert(id);
      stamp[id] = updated.datestamp;
    }
  }
}

TEST_CASE("tokens: mutation, expiry, and verb binding") {
  Fixture f(5);
  f.seed(12);
  const auto first = f.ask({{"verb", "ListIdentifiers"}, {"metadataPrefix", "lago"}});
  const auto token = std::get<ListIdentifiersPayload>(first.payload).token->value;
  REQUIRE_FALSE(token.empty());
  CHECK(f.ask({{"verb", "ListIdentifiers"}, {"resumptionToken", token}}).errors.empty());
  CHECK(f.ask({{"verb", "ListRecords"}, {"resumptionToken", token}}).has_error(OaiErrorCode::BadResumptionToken));

  const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.";
  std::size_t mutations = 0;
  for (std::size_t i = 0; i < token.size(); ++i) {
    for (char c : {alphabet[(alphabet.find(token[i]) + 1) % alphabet.size()], alphabet[(alphabet.find(token[i]) + 29) % alphabet.size()]}) {
      auto bad = token;
      bad[i] = c;
      if (bad == token) continue;
      const auto xml = f.raw({{"verb", "ListIdentifiers"}, {"resumptionToken", bad}});
      CHECK(error_codes(xml) == std::vector<std::string>{"badResumptionToken"});
      ++mutations;
    }
  }
  CHECK(mutations >= token.size());
  CHECK(f.ask({{"verb", "ListIdentifiers"}, {"resumptionToken", token.substr(1)}}).has_error(OaiErrorCode::BadResumptionToken));
  CHECK(f.ask({{"verb", "ListIdentifiers"}, {"resumptionToken", token + "A"}}).has_error(OaiErrorCode::BadResumptionToken));

  // A token from another node's secret is rejected.
  Provider other(f.store, {"nodeA", kBase, "a@b", 5, 3600s}, TokenCodec("different"));
  CHECK(parse_oai_response(other.handle({{"verb", "ListIdentifiers"}, {"resumptionToken", token}}))
            .has_error(OaiErrorCode::BadResumptionToken));

  f.clock.advance(3601s);
  CHECK(f.ask({{"verb", "ListIdentifiers"}, {"resumptionToken", token}}).has_error(OaiErrorCode::BadResumptionToken));
}

TEST_CASE("token codec round-trip") {
  TokenCodec codec("k");
  TokenState s;
  s.verb = Verb::ListIdentifiers;
  s.metadata_prefix = "oai_dc";
  s.from = *parse_datestamp("2024-01-01T00:00:00Z");
  s.set = "local:data";
  s.cursor = 300;
  s.last = {*parse_datestamp("2024-01-02T00:00:00Z"), "0f8fad5b-d9cb-469f-a165-70867728950e"};
  s.issued = *parse_datestamp("2024-01-03T00:00:00Z");
  s.expires = s.issued + 3600s;
  const auto t = codec.encode(s);
  CHECK(codec.decode(t) == s);
  CHECK(t.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.") == std::string::npos);
  CHECK(base64url_decode(base64url_encode("\x01\xff\xfe hello")) == std::string("\x01\xff\xfe hello"));
  CHECK_FALSE(base64url_decode("a").has_value());
}

TEST_CASE("error totality over fuzzed query maps") {
  Fixture f(3);
  const auto items = f.seed(8);
  f.store.soft_delete_item(items[2].uuid);
  const auto token = std::get<ListRecordsPayload>(f.ask({{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}}).payload).token->value;
  std::mt19937_64 rng(77);
  const std::vector<std::string> keys{"verb", "metadataPrefix", "identifier", "from", "until", "set", "resumptionToken", "bogus", ""};
  const std::vector<std::string> verbs{"Identify", "ListMetadataFormats", "ListSets", "ListIdentifiers", "ListRecords", "GetRecord", "listrecords", "", "Identify "};
  const std::vector<std::string> values{"oai_dc", "lago", "marc", "oai:nodeA:" + items[0].uuid, "oai:nodeA:" + items[2].uuid, "oai:x:y",
                                        "2024-01-01", "2024-01-01T00:00:00Z", "2030-13-45", "2024-01-01T00:00:00", "local:data",
                                        "mirror:nodeB", "local:", token, token + "x", "", "<&>\"'", "\xff\xfe", std::string(300, 'a')};
  for (int i = 0; i < 1500; ++i) {
    http::QueryParams q;
    for (int k = rng() % 5; k > 0; --k) {
      const auto& key = keys[rng() % keys.size()];
      q.emplace_back(key, key == "verb" ? verbs[rng() % verbs.size()] : values[rng() % values.size()]);
    }
    const auto xml = f.raw(q);
    check_valid(xml);
  }
}

TEST_CASE("model render and parse round-trip") {
  Fixture f(4);
  const auto items = f.seed(9);
  f.store.soft_delete_item(items[0].uuid);
  const std::vector<http::QueryParams> queries{
      {{"verb", "Identify"}},
      {{"verb", "ListMetadataFormats"}},
      {{"verb", "ListSets"}},
      {{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}},
      {{"verb", "ListRecords"}, {"metadataPrefix", "lago"}},
      {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"set", "local:data"}},
      {{"verb", "GetRecord"}, {"identifier", "oai:nodeA:" + items[1].uuid}, {"metadataPrefix", "lago"}},
      {{"verb", "GetRecord"}, {"identifier", "oai:nodeA:" + items[0].uuid}, {"metadataPrefix", "lago"}},
      {{"verb", "Nope"}},
  };
  for (const auto& q : queries) {
    const auto xml = f.raw(q);
    const auto model = parse_oai_response(xml);
    CHECK(render_oai_response(model) == xml);
    CHECK(parse_oai_response(render_oai_response(model)) == model);
  }
  const auto list = std::get<ListRecordsPayload>(f.ask({{"verb", "ListRecords"}, {"metadataPrefix", "lago"}}).payload);
  CHECK(list.records.size() == 4);
  CHECK(list.token.has_value());
}

TEST_CASE("parser rejects malformed responses and keeps unknown elements") {
  Fixture f;
  auto xml = f.raw({{"verb", "Identify"}});
  auto no_date = xml;
  const auto a = no_date.find("<responseDate>");
  const auto b = no_date.find("</responseDate>") + std::string("</responseDate>").size();
  no_date.erase(a, b - a);
  try {
    parse_oai_response(no_date);
    FAIL("expected ProtocolError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProtocolError);
    CHECK(e.subject().find("responseDate") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_oai_response("not xml"), Error);
  CHECK_THROWS_AS(parse_oai_response("<OAI-PMH xmlns=\"urn:other\"/>"), Error);

  auto extra = xml;
  extra.insert(extra.find("</OAI-PMH>"), "<vendorExtension xmlns=\"urn:v\">x</vendorExtension>");
  const auto model = parse_oai_response(extra);
  CHECK(model.unknown.size() == 1);
  CHECK(std::holds_alternative<IdentifyInfo>(model.payload));
}

TEST_CASE("harvest restarts once on a rejected token") {
  Fixture f(4);
  f.seed(10);
  int rejections = 1;
  http::LoopbackTransport net;
  net.attach("http://p.test", [&](const http::Request& r) {
    auto q = r.query;
    for (auto& [k, v] : q)
      if (k == "resumptionToken" && rejections > 0) {
        --rejections;
        v = "tampered";
      }
    http::Request routed = r;
    routed.query = q;
    return f.provider.handle_http(routed);
  });
  std::size_t callbacks = 0;
  const auto rep = harvest(net, f.clock, {kBase, "lago"}, [&](const Record&) { ++callbacks; });
  CHECK(rep.restarts == 1);
  CHECK(rep.received == 10);
  CHECK(callbacks == 14);

  rejections = 2;
  CHECK_THROWS_AS(harvest(net, f.clock, {kBase, "lago"}, [](const Record&) {}), Error);
}

TEST_CASE("harvest transport failures retry then surface") {
  Fixture f;
  f.seed(2);
  f.net.set_down("http://p.test", true);
  const auto before = f.clock.now();
  try {
    harvest(f.net, f.clock, {kBase, "lago"}, [](const Record&) {});
    FAIL("expected TransportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportError);
  }
  CHECK(f.clock.now() - before >= 7s);
  CHECK(f.net.request_count() == 4);

  http::LoopbackTransport html;
  html.attach("http://p.test", [](const http::Request&) { return http::text_response(503, "text/plain", "busy"); });
  try {
    harvest(html, f.clock, {kBase, "lago"}, [](const Record&) {});
    FAIL("expected ProtocolError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProtocolError);
  }
}

TEST_CASE("POST requests are answered like GET") {
  Fixture f;
  f.seed(1);
  http::Request r;
  r.method = "POST";
  r.headers["Content-Type"] = "application/x-www-form-urlencoded";
  r.body = "verb=ListIdentifiers&metadataPrefix=oai_dc";
  const auto resp = f.net.send(kBase, r);
  CHECK(resp.status == 200);
  CHECK(resp.header("Content-Type") == "text/xml; charset=UTF-8");
  check_valid(resp.body);
  CHECK(std::get<ListIdentifiersPayload>(parse_oai_response(resp.body).payload).headers.size() == 1);
}
