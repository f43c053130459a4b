#include <doctest.h>

#include <atomic>
#include <set>
#include <thread>

#include "lago/common/error.hpp"
#include "lago/pid/handle.hpp"
#include "lago/pid/registry.hpp"
#include "lago/pid/rest.hpp"
#include "support.hpp"

using namespace lago;
using namespace lago::pid;

namespace {

constexpr const char* kPrefix = "20.500.0001";

HandleValue url(std::string data) { return {0, "URL", std::move(data), {}}; }
HandleValue tmpl(std::string data) { return {0, std::string(kTemplateType), std::move(data), {}}; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

std::string random_segment(std::mt19937_64& rng) {
  static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._~-";
  std::string s(1 + rng() % 12, 'x');
  for (auto& c : s) c = alphabet[rng() % alphabet.size()];
  return s;
}

}  // namespace

TEST_CASE("handle grammar") {
  const auto n = HandleName::parse("20.500.0001/LAGO-DATA/run042/file7.dat");
  CHECK(n.prefix == "20.500.0001");
  CHECK(n.segments == std::vector<std::string>{"LAGO-DATA", "run042", "file7.dat"});
  CHECK(n.suffix() == "LAGO-DATA/run042/file7.dat");
  CHECK(n.key(1) == HandleName::parse("20.500.0001/lago-data").key());
  for (const char* bad : {"", "20.500", "abc/x", "20.500.0001/", "20.500.0001/a//b", "20.500.0001/a b",
                          "20.500.0001/a%2Fb", "20.500.0001/x?y", "/x"})
    CHECK_MESSAGE(code_of([&] { HandleName::parse(bad); }) == ErrorCode::InvalidHandle, bad);
}

TEST_CASE("template rules") {
  const auto r = TemplateRule::parse("URL=https://node.example/d/{part}\nCHECKSUM=md5:{part}:{part}");
  REQUIRE(r.lines.size() == 2);
  const auto v = r.expand("run/1", {});
  REQUIRE(v.size() == 2);
  CHECK(v[0].type == "URL");
  CHECK(v[0].data == "https://node.example/d/run/1");
  CHECK(v[1].data == "md5:run/1:run/1");
  CHECK(v[0].index != v[1].index);
  CHECK(code_of([] { TemplateRule::parse("URL=https://x/static"); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { TemplateRule::parse("no equals sign {part}"); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { TemplateRule::parse(""); }) == ErrorCode::InvalidValue);
}

TEST_CASE("mint and resolve") {
  FakeClock clock;
  HandleRegistry reg(kPrefix, clock);
  const auto h = reg.mint("run-042", {url("https://node.example/items/1")});
  CHECK(h.text() == "20.500.0001/run-042");
  CHECK(h.values[0].index == 1);
  CHECK(h.values[0].timestamp == clock.now_seconds());
  CHECK(code_of([&] { reg.mint("run-042", {url("x")}); }) == ErrorCode::SuffixTaken);
  CHECK(code_of([&] { reg.mint("RUN-042", {url("x")}); }) == ErrorCode::SuffixTaken);
  CHECK(code_of([&] { reg.mint("other", {}); }) == ErrorCode::EmptyValues);
  CHECK(code_of([&] { reg.mint("bad suffix", {url("x")}); }) == ErrorCode::InvalidHandle);
  CHECK(code_of([&] { reg.mint("two", {tmpl("URL={part}"), tmpl("URL=a{part}")}); }) == ErrorCode::InvalidValue);
  CHECK(code_of([&] { reg.mint("dup", {{3, "URL", "a", {}}, {3, "URL", "b", {}}}); }) == ErrorCode::InvalidValue);

  const auto a = reg.mint(std::nullopt, {url("a")});
  const auto b = reg.mint(std::nullopt, {url("b")});
  CHECK(a.suffix != b.suffix);
  CHECK(reg.size() == 3);

  const auto r = reg.resolve("20.500.0001/RUN-042");
  CHECK_FALSE(r.derived);
  CHECK(r.values == h.values);
  CHECK(reg.find("20.500.0001/run-042")->suffix == "run-042");
  CHECK(code_of([&] { reg.resolve("20.500.0001/NOPE/x"); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { reg.resolve("not a handle"); }) == ErrorCode::InvalidHandle);
  CHECK(code_of([&] { reg.resolve("20.500.9999/run-042"); }) == ErrorCode::NotFound);
}

TEST_CASE("derived resolution from a template base") {
  FakeClock clock;
  HandleRegistry reg(kPrefix, clock);
  reg.mint("LAGO-DATA", {tmpl("URL=https://node.example/d/{part}")});
  const auto r = reg.resolve("20.500.0001/LAGO-DATA/run042/file7.dat");
  CHECK(r.derived);
  REQUIRE(r.values.size() == 1);
  CHECK(r.values[0].type == "URL");
  CHECK(r.values[0].data == "https://node.example/d/run042/file7.dat");
  CHECK(r.source == "20.500.0001/LAGO-DATA");
  CHECK(reg.size() == 1);

  CHECK(code_of([&] { reg.update("20.500.0001/LAGO-DATA/run042", {url("x")}); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { reg.remove("20.500.0001/LAGO-DATA/run042"); }) == ErrorCode::NotFound);

  reg.update("20.500.0001/LAGO-DATA", {tmpl("URL=https://mirror.example/{part}")});
  CHECK(reg.resolve("20.500.0001/LAGO-DATA/z").values[0].data == "https://mirror.example/z");
  reg.remove("20.500.0001/LAGO-DATA");
  CHECK(code_of([&] { reg.resolve("20.500.0001/LAGO-DATA/run042/file7.dat"); }) == ErrorCode::NotFound);
  CHECK(reg.size() == 0);
}

TEST_CASE("a base without a template does not derive") {
  FakeClock clock;
  HandleRegistry reg(kPrefix, clock);
  reg.mint("plain", {url("https://x")});
  CHECK(code_of([&] { reg.resolve("20.500.0001/plain/sub"); }) == ErrorCode::NotFound);
}

TEST_CASE("on-the-fly parts never register anything") {
  FakeClock clock;
  HandleRegistry reg(kPrefix, clock);
  reg.mint("BASE", {tmpl("URL=https://n/{part}")});
  std::mt19937_64 rng(99);
  std::set<std::string> parts;
  while (parts.size() < 10000) {
    std::string part = random_segment(rng);
    for (int d = rng() % 3; d > 0; --d) part += "/" + random_segment(rng);
    parts.insert(part);
  }
  for (const auto& p : parts) {
    const auto r = reg.resolve("20.500.0001/BASE/" + p);
    CHECK(r.derived);
    CHECK(r.values.at(0).data == "https://n/" + p);
  }
  CHECK(reg.size() == 1);
}

TEST_CASE("longest templated base wins") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    FakeClock clock;
    HandleRegistry reg(kPrefix, clock);
    const std::size_t depth = 2 + rng() % 5;
    std::vector<std::string> segs;
    for (std::size_t i = 0; i < depth; ++i) segs.push_back(random_segment(rng) + std::to_string(i));
    // Register a random nonempty subset of proper prefixes as templated bases.
    std::vector<std::size_t> bases;
    for (std::size_t n = 1; n < depth; ++n)
      if (rng() % 2 || (n == depth - 1 && bases.empty())) bases.push_back(n);
    for (auto n : bases) {
      std::string suffix = segs[0];
      for (std::size_t i = 1; i < n; ++i) suffix += "/" + segs[i];
      reg.mint(suffix, {tmpl("URL=" + std::to_string(n) + ":{part}")});
    }
    std::string full = kPrefix;
    for (const auto& s : segs) full += "/" + s;
    const auto r = reg.resolve(full);
    const auto longest = bases.back();
    std::string part = segs[longest];
    for (std::size_t i = longest + 1; i < depth; ++i) part += "/" + segs[i];
    CHECK(r.derived);
    CHECK(r.values.at(0).data == std::to_string(longest) + ":" + part);
    CHECK(reg.size() == bases.size());
  }
}

TEST_CASE("registry persists through its log") {
  testing::TempDir dir;
  FakeClock clock;
  const auto log = dir / "pid.log";
  {
    HandleRegistry reg(kPrefix, clock, log, false);
    reg.mint("a", {url("1")});
    reg.mint("b", {url("2")});
    reg.mint("T", {tmpl("URL=t/{part}")});
    reg.update("20.500.0001/a", {url("1b")});
    reg.remove("20.500.0001/b");
  }
  HandleRegistry again(kPrefix, clock, log, false);
  CHECK(again.size() == 2);
  CHECK(again.resolve("20.500.0001/a").values[0].data == "1b");
  CHECK(again.resolve("20.500.0001/T/x").derived);
  CHECK(code_of([&] { again.resolve("20.500.0001/b"); }) == ErrorCode::NotFound);
}

TEST_CASE("concurrent resolves while minting") {
  FakeClock clock;
  HandleRegistry reg(kPrefix, clock);
  reg.mint("BASE", {tmpl("URL={part}")});
  std::atomic<int> failures{0};
  std::vector<std::jthread> readers;
  for (int t = 0; t < 3; ++t)
    readers.emplace_back([&, t] {
      for (int i = 0; i < 2000; ++i)
        if (reg.resolve("20.500.0001/BASE/p" + std::to_string(t * 10000 + i)).values.at(0).data !=
            "p" + std::to_string(t * 10000 + i))
          ++failures;
    });
  for (int i = 0; i < 300; ++i) reg.mint("m" + std::to_string(i), {url("x")});
  readers.clear();
  CHECK(failures == 0);
  CHECK(reg.size() == 301);
}

TEST_CASE("REST surface and remote client") {
  FakeClock clock;
  HandleRegistry reg(kPrefix, clock);
  http::LoopbackTransport net;
  net.attach("http://pid.test", [&](const http::Request& r) { return handle_pid_request(reg, "tok", r); });

  RestPidClient client(net, "http://pid.test", kPrefix, "tok");
  const auto h = client.mint("run-1", {url("https://x/1")});
  CHECK(h.text() == "20.500.0001/run-1");
  client.mint("T", {tmpl("URL=https://t/{part}")});
  CHECK(client.resolve("20.500.0001/run-1").values == reg.resolve("20.500.0001/run-1").values);
  const auto d = client.resolve("20.500.0001/T/a/b");
  CHECK(d.derived);
  CHECK(d.values[0].data == "https://t/a/b");
  client.update("20.500.0001/run-1", {url("https://x/2")});
  CHECK(reg.resolve("20.500.0001/run-1").values[0].data == "https://x/2");
  CHECK(code_of([&] { client.mint("run-1", {url("y")}); }) == ErrorCode::SuffixTaken);
  CHECK(code_of([&] { client.resolve("20.500.0001/zzz"); }) == ErrorCode::NotFound);
  client.remove("20.500.0001/run-1");
  CHECK(reg.size() == 1);

  http::Request get;
  get.method = "GET";
  get.path = "/pid/handles/20.500.0001/T/run042";
  auto resp = net.send("http://pid.test", get);
  CHECK(resp.status == 200);
  CHECK(resp.header("X-Derived") == "true");
  get.path = "/pid/handles/20.500.0001/missing";
  CHECK(net.send("http://pid.test", get).status == 404);

  RestPidClient wrong(net, "http://pid.test", kPrefix, "nope");
  CHECK(code_of([&] { wrong.mint("z", {url("y")}); }) == ErrorCode::Unauthorized);
  CHECK(wrong.resolve("20.500.0001/T/q").derived);
  CHECK(reg.size() == 1);
}
