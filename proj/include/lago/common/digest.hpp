#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace lago {

std::string to_hex(std::string_view bytes);
bool is_lower_hex(std::string_view text, std::size_t length);

std::string md5_hex(std::string_view data);
std::string sha256_hex(std::string_view data);
std::string hmac_sha256_hex(std::string_view key, std::string_view data);

// Cryptographically strong random bytes.
std::string random_bytes(std::size_t n);

// Constant-time comparison for secrets and MACs.
bool equal_constant_time(std::string_view a, std::string_view b);

// Incremental MD5 for streaming file content.
class Md5 {
 public:
  Md5();
  ~Md5();
  Md5(const Md5&) = delete;
  Md5& operator=(const Md5&) = delete;

  void update(std::string_view data);
  std::string hex_digest();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace lago
