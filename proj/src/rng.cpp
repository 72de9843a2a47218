#include "floras/rng.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <string>

#include "floras/error.hpp"

namespace floras {

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest out{};
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

void append_be64(std::vector<std::uint8_t>& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose, std::uint64_t trial,
                          std::uint64_t round) {
  std::vector<std::uint8_t> msg;
  msg.reserve(28 + purpose.size());
  append_be64(msg, master_seed);
  append_be32(msg, static_cast<std::uint32_t>(purpose.size()));
  msg.insert(msg.end(), purpose.begin(), purpose.end());
  append_be64(msg, trial);
  append_be64(msg, round);
  const Digest d = sha256(msg);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | d[static_cast<std::size_t>(i)];
  return seed;
}

void fill_normal(Rng& rng, std::span<double> out, double stddev) {
  if (stddev == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::normal_distribution<double> normal(0.0, stddev);
  for (double& v : out) v = normal(rng);
}

std::vector<std::uint8_t> parse_hex(std::string_view hex) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError("invalid hex digit '" + std::string(1, c) + "'");
  };
  if (hex.size() % 2 != 0) throw ConfigError("hex string must have an even number of digits");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace floras
