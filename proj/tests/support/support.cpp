#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <set>

#include "lago/common/digest.hpp"
#include "lago/common/error.hpp"
#include "lago/common/files.hpp"
#include "lago/xml/xml.hpp"

namespace lago::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "lago-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

metadata::MetadataRecord valid_record(std::size_t n) {
  static const char* kTypes[] = {"raw", "analysis", "simulation"};
  metadata::MetadataRecord r;
  r.add("title", "Run " + std::to_string(n));
  r.add("date.issued", "2023-0" + std::to_string(1 + n % 9) + "-1" + std::to_string(n % 10));
  r.add("type", kTypes[n % 3]);
  r.add("coverage.site", "site-" + std::to_string(n % 7));
  r.add("lago.detector", "wcd-" + std::to_string(n % 5));
  r.add("lago.rcut", std::to_string(n % 30) + ".5");
  r.add("lago.altitude", std::to_string(100 + (n * 37) % 4000));
  return r;
}

metadata::MetadataRecord random_record(std::mt19937_64& rng, std::size_t n) {
  auto r = valid_record(n);
  std::uniform_int_distribution<int> extra(0, 3);
  const int k = extra(rng);
  static const char* kKeys[] = {"description", "subject", "contributor.author", "description.abstract"};
  for (int i = 0; i < k; ++i) {
    std::string value = "v" + std::to_string(rng() % 100000) + " & <x> \"q\" ümlaut";
    r.add(kKeys[rng() % 4], value);
  }
  return r;
}

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  std::string s(rng() % (max_len + 1), '\0');
  for (auto& c : s) c = static_cast<char>(rng() & 0xff);
  return s;
}

std::string node_url(const std::string& name) { return "http://" + name + ".test"; }

federation::NodeConfig node_config(const std::string& name, const fs::path& data_dir, std::size_t page_size) {
  federation::NodeConfig c;
  c.node_name = name;
  c.http_bind = "127.0.0.1:0";
  c.public_url = node_url(name);
  c.pid_prefix = std::string(kPidPrefix);
  c.deposit_token = std::string(kToken);
  c.page_size = page_size;
  c.data_dir = data_dir;
  c.token_secret = "test-secret-" + name;
  c.collections = {federation::CollectionConfig{std::string(kCollection), "Data of " + name, name}};
  return c;
}

TestNode::TestNode(const std::string& name, const fs::path& data_dir, Clock& clock, http::LoopbackTransport& net,
                   std::size_t page_size, std::vector<federation::PeerConfig> peers)
    : url(node_url(name)) {
  auto config = node_config(name, data_dir, page_size);
  config.peers = std::move(peers);
  federation::NodeOptions options;
  options.durable = false;
  node = std::make_unique<federation::Node>(config, clock, net, options);
  auto* n = node.get();
  net.attach(url, [n](const http::Request& r) { return n->handle(r); });
}

namespace {

// OAI-PMH 2.0 schema, restated independently of the provider's renderer.
const std::string kOai = "http://www.openarchives.org/OAI/2.0/";
const std::regex kUtcDateTime(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
const std::regex kUtcDate(R"(\d{4}-\d{2}-\d{2})");
const std::regex kPrefix(R"([A-Za-z0-9\-_\.!~\*'\(\)]+)");
const std::regex kSetSpec(R"([A-Za-z0-9\-_\.!~\*'\(\)]+(:[A-Za-z0-9\-_\.!~\*'\(\)]+)*)");
const std::regex kAnyUri(R"([^\s]+)");
const std::regex kEmail(R"(\S+@(\S+\.)*\S+)");
const std::set<std::string> kVerbs{"Identify",        "ListMetadataFormats", "ListSets",
                                   "ListIdentifiers", "ListRecords",         "GetRecord"};
const std::set<std::string> kErrorCodes{"cannotDisseminateFormat", "idDoesNotExist",    "badArgument",
                                        "badVerb",                 "noMetadataFormats", "noRecordsMatch",
                                        "badResumptionToken",      "noSetHierarchy"};
const std::set<std::string> kRequestAttributes{"verb", "identifier", "metadataPrefix", "from",
                                               "until", "set",       "resumptionToken"};

struct Checker {
  std::vector<std::string> problems;

  void fail(const std::string& where, const std::string& what) { problems.push_back(where + ": " + what); }

  bool matches(const std::string& s, const std::regex& re) { return std::regex_match(s, re); }

  // Children must follow `order` (local names); `min`/`max` per entry.
  struct Slot {
    std::string name;
    std::size_t min;
    std::size_t max;
  };

  std::vector<std::vector<const xml::Element*>> sequence(const xml::Element& e, const std::string& where,
                                                          const std::vector<Slot>& slots) {
    std::vector<std::vector<const xml::Element*>> out(slots.size());
    std::size_t slot = 0;
    for (const auto& c : e.children) {
      if (!c.prefix().empty()) {
        fail(where, "prefixed child <" + c.name + "> not in the OAI namespace");
        continue;
      }
      while (slot < slots.size() && slots[slot].name != c.local_name()) ++slot;
      if (slot == slots.size()) {
        fail(where, "unexpected or out-of-order child <" + c.name + ">");
        return out;
      }
      out[slot].push_back(&c);
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (out[i].size() < slots[i].min) fail(where, "missing <" + slots[i].name + ">");
      if (out[i].size() > slots[i].max) fail(where, "too many <" + slots[i].name + ">");
    }
    if (!e.text.empty() && !e.children.empty()) fail(where, "mixed content");
    return out;
  }

  void leaf(const xml::Element& e, const std::string& where, const std::regex* lexical = nullptr) {
    if (!e.children.empty()) fail(where, "must be a simple value");
    if (lexical && !matches(e.text, *lexical)) fail(where, "bad value '" + e.text + "'");
  }

  void no_attributes(const xml::Element& e, const std::string& where, const std::set<std::string>& allowed = {}) {
    for (const auto& [k, v] : e.attributes)
      if (!allowed.count(k) && !k.starts_with("xmlns")) fail(where, "unexpected attribute " + k);
  }

  void header(const xml::Element& h, const std::string& where) {
    no_attributes(h, where, {"status"});
    if (const auto* st = h.attribute("status"); st && *st != "deleted") fail(where, "status must be 'deleted'");
    auto parts = sequence(h, where, {{"identifier", 1, 1}, {"datestamp", 1, 1}, {"setSpec", 0, SIZE_MAX}});
    for (auto* e : parts[0]) leaf(*e, where + "/identifier", &kAnyUri);
    for (auto* e : parts[1]) {
      leaf(*e, where + "/datestamp");
      if (!matches(e->text, kUtcDateTime) && !matches(e->text, kUtcDate)) fail(where + "/datestamp", "bad date");
    }
    for (auto* e : parts[2]) leaf(*e, where + "/setSpec", &kSetSpec);
  }

  void record(const xml::Element& r, const std::string& where) {
    no_attributes(r, where);
    auto parts = sequence(r, where, {{"header", 1, 1}, {"metadata", 0, 1}, {"about", 0, SIZE_MAX}});
    for (auto* h : parts[0]) header(*h, where + "/header");
    for (auto* m : parts[1]) {
      if (m->children.size() != 1) fail(where + "/metadata", "must hold exactly one element");
      else if (m->children[0].namespace_uri({&r, m}) == kOai || m->children[0].namespace_uri({&r, m}).empty())
        fail(where + "/metadata", "payload must be in a foreign namespace");
    }
    const bool deleted = !parts[0].empty() && parts[0][0]->attribute("status");
    if (deleted && !parts[1].empty()) fail(where, "deleted record carries metadata");
  }

  void token(const xml::Element& t, const std::string& where) {
    no_attributes(t, where, {"expirationDate", "completeListSize", "cursor"});
    if (!t.children.empty()) fail(where, "must be a simple value");
    static const std::regex kNonNeg(R"(0|[1-9]\d*)");
    static const std::regex kPos(R"([1-9]\d*)");
    if (const auto* v = t.attribute("expirationDate"); v && !matches(*v, kUtcDateTime))
      fail(where, "bad expirationDate");
    if (const auto* v = t.attribute("completeListSize"); v && !matches(*v, kPos)) fail(where, "bad completeListSize");
    if (const auto* v = t.attribute("cursor"); v && !matches(*v, kNonNeg)) fail(where, "bad cursor");
  }

  void payload(const xml::Element& p, const std::string& verb) {
    const std::string where = "OAI-PMH/" + verb;
    no_attributes(p, where);
    if (verb == "Identify") {
      auto parts = sequence(p, where,
                            {{"repositoryName", 1, 1},
                             {"baseURL", 1, 1},
                             {"protocolVersion", 1, 1},
                             {"adminEmail", 1, SIZE_MAX},
                             {"earliestDatestamp", 1, 1},
                             {"deletedRecord", 1, 1},
                             {"granularity", 1, 1},
                             {"compression", 0, SIZE_MAX},
                             {"description", 0, SIZE_MAX}});
      for (auto* e : parts[1]) leaf(*e, where + "/baseURL", &kAnyUri);
      for (auto* e : parts[2])
        if (e->text != "2.0") fail(where, "protocolVersion must be 2.0");
      for (auto* e : parts[3]) leaf(*e, where + "/adminEmail", &kEmail);
      for (auto* e : parts[4])
        if (!matches(e->text, kUtcDateTime) && !matches(e->text, kUtcDate)) fail(where, "bad earliestDatestamp");
      for (auto* e : parts[5])
        if (e->text != "no" && e->text != "persistent" && e->text != "transient") fail(where, "bad deletedRecord");
      for (auto* e : parts[6])
        if (e->text != "YYYY-MM-DD" && e->text != "YYYY-MM-DDThh:mm:ssZ") fail(where, "bad granularity");
    } else if (verb == "ListMetadataFormats") {
      auto parts = sequence(p, where, {{"metadataFormat", 1, SIZE_MAX}});
      for (auto* f : parts[0]) {
        auto fp = sequence(*f, where + "/metadataFormat",
                           {{"metadataPrefix", 1, 1}, {"schema", 1, 1}, {"metadataNamespace", 1, 1}});
        for (auto* e : fp[0]) leaf(*e, where + "/metadataPrefix", &kPrefix);
        for (auto* e : fp[1]) leaf(*e, where + "/schema", &kAnyUri);
        for (auto* e : fp[2]) leaf(*e, where + "/metadataNamespace", &kAnyUri);
      }
    } else if (verb == "ListSets") {
      auto parts = sequence(p, where, {{"set", 1, SIZE_MAX}, {"resumptionToken", 0, 1}});
      for (auto* s : parts[0]) {
        auto sp = sequence(*s, where + "/set", {{"setSpec", 1, 1}, {"setName", 1, 1}, {"setDescription", 0, SIZE_MAX}});
        for (auto* e : sp[0]) leaf(*e, where + "/set/setSpec", &kSetSpec);
      }
      for (auto* t : parts[1]) token(*t, where + "/resumptionToken");
    } else if (verb == "ListIdentifiers") {
      auto parts = sequence(p, where, {{"header", 1, SIZE_MAX}, {"resumptionToken", 0, 1}});
      for (auto* h : parts[0]) header(*h, where + "/header");
      for (auto* t : parts[1]) token(*t, where + "/resumptionToken");
    } else if (verb == "ListRecords") {
      auto parts = sequence(p, where, {{"record", 1, SIZE_MAX}, {"resumptionToken", 0, 1}});
      for (auto* r : parts[0]) record(*r, where + "/record");
      for (auto* t : parts[1]) token(*t, where + "/resumptionToken");
    } else if (verb == "GetRecord") {
      auto parts = sequence(p, where, {{"record", 1, 1}});
      for (auto* r : parts[0]) record(*r, where + "/record");
    }
  }

  void check(const xml::Element& root) {
    if (root.name != "OAI-PMH") return fail("/", "root must be <OAI-PMH>, got <" + root.name + ">");
    if (root.namespace_uri() != kOai) fail("OAI-PMH", "wrong default namespace");
    const auto* loc = root.attribute("xsi:schemaLocation");
    if (!loc || loc->find(kOai) == std::string::npos || loc->find("OAI-PMH.xsd") == std::string::npos)
      fail("OAI-PMH", "missing schemaLocation");
    if (root.children.size() < 3) return fail("OAI-PMH", "needs responseDate, request and a body");
    const auto& date = root.children[0];
    if (date.name != "responseDate") fail("OAI-PMH", "first child must be responseDate");
    else leaf(date, "OAI-PMH/responseDate", &kUtcDateTime);
    const auto& request = root.children[1];
    if (request.name != "request") return fail("OAI-PMH", "second child must be request");
    leaf(request, "OAI-PMH/request", &kAnyUri);
    for (const auto& [k, v] : request.attributes) {
      if (!kRequestAttributes.count(k)) fail("OAI-PMH/request", "illegal attribute " + k);
      if (k == "verb" && !kVerbs.count(v)) fail("OAI-PMH/request", "illegal verb value " + v);
    }
    std::size_t errors = 0;
    std::size_t bodies = 0;
    for (std::size_t i = 2; i < root.children.size(); ++i) {
      const auto& c = root.children[i];
      if (c.name == "error") {
        ++errors;
        no_attributes(c, "OAI-PMH/error", {"code"});
        const auto* code = c.attribute("code");
        if (!code || !kErrorCodes.count(*code)) fail("OAI-PMH/error", "bad or missing code");
        if (!c.children.empty()) fail("OAI-PMH/error", "must be a simple value");
      } else if (kVerbs.count(c.name)) {
        ++bodies;
        const auto* verb = request.attribute("verb");
        if (!verb || *verb != c.name) fail("OAI-PMH/" + c.name, "body does not match request verb");
        payload(c, c.name);
      } else {
        fail("OAI-PMH", "unexpected element <" + c.name + ">");
      }
    }
    if ((errors == 0) == (bodies == 0) || bodies > 1) fail("OAI-PMH", "needs either errors or exactly one verb body");
    if (errors > 0 && bodies > 0) fail("OAI-PMH", "errors and a body together");
  }
};

}  // namespace

std::vector<std::string> oai_schema_problems(const std::string& text) {
  if (!text.starts_with("<?xml")) return {"document does not start with an XML declaration"};
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const std::exception& e) {
    return {std::string("not well-formed: ") + e.what()};
  }
  Checker c;
  c.check(root);
  return c.problems;
}

std::string tree_hash(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (e.is_directory())
      files.emplace_back(rel + "/", "");
    else
      files.emplace_back(rel, read_file(e.path()));
  }
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const auto& [name, data] : files) {
    acc += name;
    acc.push_back('\0');
    acc += std::to_string(data.size());
    acc.push_back('\0');
    acc += data;
  }
  return sha256_hex(acc);
}

}  // namespace lago::testing
