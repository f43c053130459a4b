#include "lago/zip/zip.hpp"

#include <zlib.h>

#include <cstdint>

#include "lago/common/error.hpp"

namespace lago::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
// 1980-01-01 00:00 in MS-DOS format.
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;
constexpr std::uint16_t kDosTime = 0;

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - done, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + done), chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void damaged(const std::string& what, const std::string& entry = "<archive>") {
  throw Error(ErrorCode::InvalidPackage, "zip archive: " + what, entry);
}

struct Reader {
  std::string_view bytes;

  std::uint16_t u16(std::size_t pos) const {
    if (pos + 2 > bytes.size()) damaged("truncated");
    return static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[pos]) |
                                      (static_cast<unsigned char>(bytes[pos + 1]) << 8));
  }
  std::uint32_t u32(std::size_t pos) const {
    if (pos + 4 > bytes.size()) damaged("truncated");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)]);
    return v;
  }
  std::string_view slice(std::size_t pos, std::size_t n) const {
    if (pos > bytes.size() || n > bytes.size() - pos) damaged("truncated");
    return bytes.substr(pos, n);
  }
};

std::string inflate_raw(std::string_view in, std::size_t expected, const std::string& name) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) damaged("inflate init failed", name);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) damaged("corrupt deflate stream", name);
  return out;
}

}  // namespace

std::string write_archive(const std::vector<Entry>& entries) {
  std::string out;
  std::string central;
  for (const auto& e : entries) {
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto crc = crc_of(e.data);
    const auto size = static_cast<std::uint32_t>(e.data.size());
    const auto name_len = static_cast<std::uint16_t>(e.name.size());

    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0x0800);  // UTF-8 names
    put16(out, 0);  // stored
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, name_len);
    put16(out, 0);
    out += e.name;
    out += e.data;

    put32(central, kCentralSig);
    put16(central, 20);  // made by
    put16(central, 20);
    put16(central, 0x0800);
    put16(central, 0);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, name_len);
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attrs
    put32(central, e.is_directory() ? 0x10 : 0);
    put32(central, offset);
    central += e.name;
  }
  const auto central_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);
  return out;
}

std::vector<Entry> read_archive(std::string_view bytes, std::size_t max_total) {
  Reader r{bytes};
  if (bytes.size() < 22) damaged("too short to be a zip archive");

  // End-of-central-directory record; a trailing comment can push it back.
  std::size_t end = std::string_view::npos;
  const std::size_t lowest = bytes.size() > 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
  for (std::size_t pos = bytes.size() - 22 + 1; pos-- > lowest;) {
    if (r.u32(pos) == kEndSig) {
      end = pos;
      break;
    }
  }
  if (end == std::string_view::npos) damaged("end of central directory not found");

  const std::size_t count = r.u16(end + 10);
  const std::size_t central_size = r.u32(end + 12);
  std::size_t pos = r.u32(end + 16);
  if (pos + central_size > end) damaged("central directory out of bounds");

  std::vector<Entry> entries;
  std::size_t total = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (r.u32(pos) != kCentralSig) damaged("bad central directory signature");
    const auto flags = r.u16(pos + 8);
    const auto method = r.u16(pos + 10);
    const auto crc = r.u32(pos + 16);
    const std::size_t csize = r.u32(pos + 20);
    const std::size_t usize = r.u32(pos + 24);
    const std::size_t name_len = r.u16(pos + 28);
    const std::size_t extra_len = r.u16(pos + 30);
    const std::size_t comment_len = r.u16(pos + 32);
    const std::size_t local = r.u32(pos + 42);
    std::string name(r.slice(pos + 46, name_len));
    pos += 46 + name_len + extra_len + comment_len;

    if (flags & 0x1) damaged("encrypted entries are not supported", name);
    if (csize == 0xffffffff || usize == 0xffffffff) damaged("zip64 entries are not supported", name);
    total += usize;
    if (total > max_total) damaged("uncompressed size exceeds limit", name);

    if (r.u32(local) != kLocalSig) damaged("bad local header signature", name);
    const std::size_t data_at = local + 30 + r.u16(local + 26) + r.u16(local + 28);
    const auto raw = r.slice(data_at, csize);

    std::string data;
    if (method == 0) {
      if (csize != usize) damaged("stored entry size mismatch", name);
      data.assign(raw);
    } else if (method == 8) {
      data = inflate_raw(raw, usize, name);
    } else {
      damaged("unsupported compression method " + std::to_string(method), name);
    }
    if (crc_of(data) != crc) damaged("CRC mismatch", name);
    entries.push_back(Entry{std::move(name), std::move(data)});
  }
  return entries;
}

}  // namespace lago::zip
