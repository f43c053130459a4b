#include "lago/oaipmh/token.hpp"

#include <nlohmann/json.hpp>

#include "lago/common/digest.hpp"

namespace lago::oaipmh {

using nlohmann::json;

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string opt_stamp(const std::optional<Timestamp>& t) { return t ? format_datestamp(*t) : std::string{}; }

}  // namespace

std::string base64url_encode(std::string_view bytes) {
  std::string out;
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
  } else if (i + 2 == bytes.size()) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
  }
  return out;
}

std::optional<std::string> base64url_decode(std::string_view text) {
  if (text.size() % 4 == 1) return std::nullopt;
  std::string out;
  unsigned buf = 0;
  int bits = 0;
  for (char c : text) {
    const auto pos = kAlphabet.find(c);
    if (pos == std::string_view::npos) return std::nullopt;
    buf = (buf << 6) | static_cast<unsigned>(pos);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buf >> bits) & 0xff));
    }
  }
  // Non-zero leftover bits mean a non-canonical encoding.
  if (bits > 0 && (buf & ((1u << bits) - 1)) != 0) return std::nullopt;
  return out;
}

std::string TokenState::query_hash() const {
  const std::string basis = std::string(to_string(verb)) + "\n" + metadata_prefix + "\n" + opt_stamp(from) + "\n" +
                            opt_stamp(until) + "\n" + set.value_or("");
  return sha256_hex(basis).substr(0, 16);
}

std::string TokenCodec::encode(const TokenState& s) const {
  json j{{"v", 1},
         {"verb", to_string(s.verb)},
         {"prefix", s.metadata_prefix},
         {"from", opt_stamp(s.from)},
         {"until", opt_stamp(s.until)},
         {"set", s.set.value_or("")},
         {"hasSet", s.set.has_value()},
         {"qh", s.query_hash()},
         {"cursor", s.cursor},
         {"lastStamp", format_datestamp(s.last.datestamp)},
         {"lastUuid", s.last.uuid},
         {"iat", format_datestamp(s.issued)},
         {"exp", format_datestamp(s.expires)}};
  const auto body = base64url_encode(j.dump());
  return body + "." + hmac_sha256_hex(secret_, body);
}

std::optional<TokenState> TokenCodec::decode(std::string_view token) const {
  const auto dot = token.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const auto body = token.substr(0, dot);
  const auto mac = token.substr(dot + 1);
  if (!equal_constant_time(mac, hmac_sha256_hex(secret_, body))) return std::nullopt;
  const auto raw = base64url_decode(body);
  if (!raw) return std::nullopt;
  try {
    const auto j = json::parse(*raw);
    if (j.at("v").get<int>() != 1) return std::nullopt;
    TokenState s;
    auto verb = parse_verb(j.at("verb").get<std::string>());
    if (!verb) return std::nullopt;
    s.verb = *verb;
    s.metadata_prefix = j.at("prefix").get<std::string>();
    const auto stamp = [&](const char* key) -> std::optional<Timestamp> {
      const auto text = j.at(key).get<std::string>();
      if (text.empty()) return std::nullopt;
      auto t = parse_datestamp(text);
      if (!t) throw std::invalid_argument(key);
      return t;
    };
    s.from = stamp("from");
    s.until = stamp("until");
    if (j.at("hasSet").get<bool>()) s.set = j.at("set").get<std::string>();
    s.cursor = j.at("cursor").get<std::size_t>();
    auto last = stamp("lastStamp");
    auto issued = stamp("iat");
    auto expires = stamp("exp");
    if (!last || !issued || !expires) return std::nullopt;
    s.last = store::ItemKey{*last, j.at("lastUuid").get<std::string>()};
    s.issued = *issued;
    s.expires = *expires;
    if (j.at("qh").get<std::string>() != s.query_hash()) return std::nullopt;
    return s;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace lago::oaipmh
