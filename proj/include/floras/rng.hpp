#pragma once

// Random streams for reproducible simulation.
//
// Every random quantity in an experiment is drawn from a stream whose seed is
// derived from (master_seed, purpose, trial, round):
//
//   seed = first 8 bytes, big-endian, of
//          SHA-256( be64(master_seed) || be32(len(purpose)) || purpose
//                   || be64(trial) || be64(round) )
//
// and the stream itself is std::mt19937_64 seeded with that value. Because a
// stream depends only on its coordinates, trials can run in any order or in
// parallel and still produce identical output.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace floras {

using Rng = std::mt19937_64;

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);

void append_be64(std::vector<std::uint8_t>& out, std::uint64_t value);
void append_be32(std::vector<std::uint8_t>& out, std::uint32_t value);

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose, std::uint64_t trial,
                          std::uint64_t round);

inline Rng make_stream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t trial,
                       std::uint64_t round) {
  return Rng(derive_seed(master_seed, purpose, trial, round));
}

// Fills `out` with i.i.d. N(0, stddev^2) draws.
void fill_normal(Rng& rng, std::span<double> out, double stddev);

// Decodes a hex string (case-insensitive, even length). Throws ConfigError.
std::vector<std::uint8_t> parse_hex(std::string_view hex);

}  // namespace floras
