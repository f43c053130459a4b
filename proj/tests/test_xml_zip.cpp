#include <doctest.h>
#include <zlib.h>

#include <functional>

#include "lago/common/error.hpp"
#include "lago/xml/xml.hpp"
#include "lago/zip/zip.hpp"
#include "support.hpp"

using namespace lago;

namespace {

void put16(std::string& s, unsigned v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put32(std::string& s, unsigned long v) {
  put16(s, v & 0xffff);
  put16(s, (v >> 16) & 0xffff);
}

std::string raw_deflate(const std::string& data) {
  z_stream zs{};
  deflateInit2(&zs, 9, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY);
  std::string out(deflateBound(&zs, data.size()) + 16, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

// Minimal PKZIP writer independent of the library's: deflate (method 8) entries.
std::string deflate_archive(const std::vector<std::pair<std::string, std::string>>& files) {
  std::string out, central;
  for (const auto& [name, data] : files) {
    const auto packed = raw_deflate(data);
    const auto crc = crc32(0, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    const auto offset = out.size();
    put32(out, 0x04034b50);
    put16(out, 20), put16(out, 0), put16(out, 8), put16(out, 0), put16(out, 0x21);
    put32(out, crc), put32(out, packed.size()), put32(out, data.size());
    put16(out, name.size()), put16(out, 0);
    out += name + packed;
    put32(central, 0x02014b50);
    put16(central, 20), put16(central, 20), put16(central, 0), put16(central, 8), put16(central, 0),
        put16(central, 0x21);
    put32(central, crc), put32(central, packed.size()), put32(central, data.size());
    put16(central, name.size()), put16(central, 0), put16(central, 0), put16(central, 0), put16(central, 0);
    put32(central, 0), put32(central, offset);
    central += name;
  }
  const auto cd_offset = out.size();
  out += central;
  put32(out, 0x06054b50);
  put16(out, 0), put16(out, 0), put16(out, files.size()), put16(out, files.size());
  put32(out, central.size()), put32(out, cd_offset), put16(out, 0);
  return out;
}

}  // namespace

TEST_CASE("xml parse and serialize round-trip") {
  xml::Element root("a");
  root.set_attribute("x", "1 < 2 & \"3\"");
  root.add("b", "text with <markup> & 'quotes'\nand a newline\tand tab");
  auto& c = root.add(xml::Element("c"));
  c.add("d", "ü");
  const auto text = xml::serialize(root);
  CHECK(text.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"));
  auto back = xml::parse(text);
  // Offsets are parse metadata, not content.
  std::function<void(xml::Element&)> clear = [&](xml::Element& e) {
    e.offset = 0;
    for (auto& k : e.children) clear(k);
  };
  clear(back);
  CHECK(back == root);
  CHECK(xml::serialize(back) == text);
}

TEST_CASE("xml parse reports byte offsets and rejects DOCTYPE") {
  try {
    xml::parse("<a><b></a>");
    FAIL("expected MalformedXml");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedXml);
    CHECK_FALSE(e.subject().empty());
  }
  CHECK_THROWS_AS(xml::parse("<!DOCTYPE a [<!ENTITY x \"y\">]><a>&x;</a>"), Error);
  CHECK_THROWS_AS(xml::parse(""), Error);
  const auto e = xml::parse("<r>\n  <k/>\n</r>");
  CHECK(e.children.size() == 1);
  CHECK(e.children[0].offset == 6);
}

TEST_CASE("xml namespaces resolve through scope") {
  const auto root = xml::parse(R"(<a xmlns="urn:a" xmlns:p="urn:p"><p:b/><c/></a>)");
  CHECK(root.namespace_uri() == "urn:a");
  CHECK(root.children[0].namespace_uri({&root}) == "urn:p");
  CHECK(root.children[0].local_name() == "b");
  CHECK(root.children[1].namespace_uri({&root}) == "urn:a");
}

TEST_CASE("stored zip round-trip is deterministic") {
  std::vector<zip::Entry> entries{{"dir/", ""}, {"dir/a.txt", "hello"}, {"dir/empty", ""}};
  const auto z1 = zip::write_archive(entries);
  const auto z2 = zip::write_archive(entries);
  CHECK(z1 == z2);
  const auto back = zip::read_archive(z1);
  REQUIRE(back.size() == 3);
  CHECK(back[1].name == "dir/a.txt");
  CHECK(back[1].data == "hello");
  CHECK(back[0].is_directory());
}

TEST_CASE("deflated archives from an independent writer are read") {
  std::mt19937_64 rng(11);
  std::vector<std::pair<std::string, std::string>> files{
      {"item/contents", "a.dat\tbundle:ORIGINAL\n"},
      {"item/a.dat", std::string(100000, 'x') + testing::random_bytes(rng, 5000)},
      {"item/empty", ""}};
  const auto archive = deflate_archive(files);
  const auto back = zip::read_archive(archive);
  REQUIRE(back.size() == files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    CHECK(back[i].name == files[i].first);
    CHECK(back[i].data == files[i].second);
  }
}

TEST_CASE("damaged archives are rejected with the offending entry") {
  auto archive = zip::write_archive({{"item/a.txt", "hello world"}});
  // Flip a content byte: CRC mismatch names the entry.
  const auto pos = archive.find("hello");
  archive[pos] = 'j';
  try {
    zip::read_archive(archive);
    FAIL("expected InvalidPackage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPackage);
    CHECK(e.subject() == "item/a.txt");
  }
  try {
    zip::read_archive("not a zip at all");
    FAIL("expected InvalidPackage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPackage);
    CHECK(e.subject() == "<archive>");
  }
  const auto good = zip::write_archive({{"item/a.txt", "hello"}});
  CHECK_THROWS_AS(zip::read_archive(good.substr(0, good.size() - 5)), Error);
  CHECK_THROWS_AS(zip::read_archive(good, 3), Error);
}

TEST_CASE("truncated or random archives never crash the reader") {
  std::mt19937_64 rng(5);
  const auto good = zip::write_archive({{"x/a", "abc"}, {"x/b", std::string(300, 'q')}});
  for (int i = 0; i < 500; ++i) {
    auto bad = good;
    bad[rng() % bad.size()] = static_cast<char>(rng());
    try {
      zip::read_archive(bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidPackage);
    }
  }
}

TEST_CASE("serializer never emits ill-formed text") {
  CHECK(xml::is_xml_text("plain ü € 𝄞"));
  CHECK_FALSE(xml::is_xml_text("\xff"));
  CHECK_FALSE(xml::is_xml_text("a\x01"));
  CHECK_FALSE(xml::is_xml_text("\xc0\xaf"));
  CHECK_FALSE(xml::is_xml_text("\xed\xa0\x80"));
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    xml::Element e("v", testing::random_bytes(rng, 40));
    e.set_attribute("a", testing::random_bytes(rng, 20));
    const auto back = xml::parse(xml::serialize(e));
    CHECK(xml::is_xml_text(back.text));
  }
}
