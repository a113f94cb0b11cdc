#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "pairbench/common.hpp"

namespace pairbench {

using Digest = std::array<unsigned char, 32>;

inline Digest sha256(const void* data, size_t len) {
  Digest out{};
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("sha256: context allocation failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data, len) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &out_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256: digest failed");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

inline Digest sha256(std::string_view s) { return sha256(s.data(), s.size()); }

inline std::string to_hex(const Digest& d) {
  static const char* hex = "0123456789abcdef";
  std::string s(64, '0');
  for (size_t i = 0; i < d.size(); ++i) {
    s[2 * i] = hex[d[i] >> 4];
    s[2 * i + 1] = hex[d[i] & 0xf];
  }
  return s;
}

inline std::string sha256_hex(std::string_view s) { return to_hex(sha256(s)); }

inline std::string sha256_hex(const std::vector<unsigned char>& bytes) {
  return to_hex(sha256(bytes.data(), bytes.size()));
}

inline std::string hash_file(const fs::path& path) {
  return sha256_hex(read_file(path));
}

/// Hash of a list of parts with an unambiguous length-prefixed framing, so
/// ("ab","c") and ("a","bc") never collide.
inline Digest sha256_parts(std::initializer_list<std::string_view> parts) {
  std::string buf;
  for (auto p : parts) {
    uint64_t n = p.size();
    char len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<char>((n >> (8 * i)) & 0xff);
    buf.append(len, 8);
    buf.append(p.data(), p.size());
  }
  return sha256(buf);
}

/// Deterministic sub-seed: first 8 bytes (little-endian) of the keyed digest.
/// Keyed by content, not position, so per-item streams survive reordering.
inline uint64_t derive_seed(uint64_t master,
                            std::initializer_list<std::string_view> parts) {
  char m[8];
  for (int i = 0; i < 8; ++i) m[i] = static_cast<char>((master >> (8 * i)) & 0xff);
  std::string buf(m, 8);
  for (auto p : parts) {
    uint64_t n = p.size();
    char len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<char>((n >> (8 * i)) & 0xff);
    buf.append(len, 8);
    buf.append(p.data(), p.size());
  }
  Digest d = sha256(buf);
  uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed |= static_cast<uint64_t>(d[i]) << (8 * i);
  return seed;
}

}  // namespace pairbench
