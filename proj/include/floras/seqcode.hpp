#pragma once

// Spreading-sequence sets and keyed, collision-free signature assignment.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "floras/rng.hpp"

namespace floras::seqcode {

enum class SetMode { orthonormal, gaussian };

// N spreading sequences of L chips each, stored column-major: column k
// occupies chips [k*L, (k+1)*L).
class SpreadingSet {
 public:
  SpreadingSet(std::size_t chip_length, std::size_t set_size, std::vector<double> columns,
               SetMode mode);

  std::size_t chip_length() const { return chip_length_; }
  std::size_t set_size() const { return set_size_; }
  SetMode mode() const { return mode_; }

  std::span<const double> column(std::size_t k) const;
  std::span<const double> data() const { return columns_; }

  // a_i^T a_j for 0-based i, j.
  double inner(std::size_t i, std::size_t j) const;

 private:
  std::size_t chip_length_;
  std::size_t set_size_;
  std::vector<double> columns_;
  SetMode mode_;
};

// Smallest power of two >= n, never below 2.
std::size_t hadamard_order(std::size_t n);

// First N rows of the order-L Sylvester-Hadamard matrix scaled by 1/sqrt(L),
// L = hadamard_order(N). Entry (row r, chip c) is (-1)^popcount(r & c).
SpreadingSet generate_orthonormal_set(std::size_t set_size);

// Entries i.i.d. N(0, 1/L): orthonormal only in expectation.
SpreadingSet generate_gaussian_set(std::size_t chip_length, std::size_t set_size, Rng& rng);

// 0-based permutation of {0..N-1}; perm[i] is the column handed to the client
// holding 1-based index i+1.
using Permutation = std::vector<std::size_t>;

// Keyed round permutation shared by every client holding `key`.
//
// Byte-level derivation (so independent implementations agree):
//   seed    = SHA-256(key || be64(round_id))
//   block_j = SHA-256(seed || be64(j)),  j = 0, 1, 2, ...
// The blocks are concatenated into a byte stream read as big-endian uint32
// words. A uniform integer in [0, n) is drawn by rejection: take words until
// w < 2^32 - (2^32 mod n), return w mod n. Fisher-Yates then runs
// i = N-1 down to 1, swapping perm[i] with perm[uniform(i+1)], starting from
// the identity.
//
// Throws ConfigError for an empty key or N == 0.
Permutation derive_round_permutation(std::span<const std::uint8_t> key, std::uint64_t round_id,
                                     std::size_t set_size);

// Column perm(my_index) of the set, my_index being 1-based.
// Throws ArgumentError when my_index is outside 1..N.
std::vector<double> assign_signature(const SpreadingSet& set, const Permutation& perm,
                                     std::size_t my_index);

// 0-based column chosen for a 1-based client index.
std::size_t assigned_column(const Permutation& perm, std::size_t my_index);

}  // namespace floras::seqcode
