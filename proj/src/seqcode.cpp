#include "floras/seqcode.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "floras/error.hpp"
#include "floras/kernels.hpp"

namespace floras::seqcode {

SpreadingSet::SpreadingSet(std::size_t chip_length, std::size_t set_size,
                           std::vector<double> columns, SetMode mode)
    : chip_length_(chip_length), set_size_(set_size), columns_(std::move(columns)), mode_(mode) {
  if (chip_length_ == 0 || set_size_ == 0) throw ArgumentError("spreading set must be non-empty");
  if (columns_.size() != chip_length_ * set_size_) {
    throw ArgumentError("spreading set storage does not match L x N");
  }
}

std::span<const double> SpreadingSet::column(std::size_t k) const {
  if (k >= set_size_) throw ArgumentError("spreading column out of range");
  return std::span<const double>(columns_).subspan(k * chip_length_, chip_length_);
}

double SpreadingSet::inner(std::size_t i, std::size_t j) const {
  return kernels::dot(column(i), column(j));
}

std::size_t hadamard_order(std::size_t n) { return std::max<std::size_t>(2, std::bit_ceil(n)); }

SpreadingSet generate_orthonormal_set(std::size_t set_size) {
  if (set_size == 0) throw ArgumentError("set size must be positive");
  const std::size_t order = hadamard_order(set_size);
  const double amp = 1.0 / std::sqrt(static_cast<double>(order));
  std::vector<double> cols(order * set_size);
  for (std::size_t k = 0; k < set_size; ++k) {
    for (std::size_t c = 0; c < order; ++c) {
      cols[k * order + c] = (std::popcount(k & c) % 2 == 0) ? amp : -amp;
    }
  }
  return SpreadingSet(order, set_size, std::move(cols), SetMode::orthonormal);
}

SpreadingSet generate_gaussian_set(std::size_t chip_length, std::size_t set_size, Rng& rng) {
  if (chip_length == 0 || set_size == 0) throw ArgumentError("set dimensions must be positive");
  std::vector<double> cols(chip_length * set_size);
  fill_normal(rng, cols, 1.0 / std::sqrt(static_cast<double>(chip_length)));
  return SpreadingSet(chip_length, set_size, std::move(cols), SetMode::gaussian);
}

namespace {

// Byte stream of SHA-256 blocks chained off a seed digest.
class HashStream {
 public:
  explicit HashStream(const Digest& seed) : seed_(seed) {}

  std::uint32_t next_word() {
    std::uint32_t w = 0;
    for (int i = 0; i < 4; ++i) w = (w << 8) | next_byte();
    return w;
  }

  std::uint32_t uniform_below(std::uint32_t n) {
    const std::uint64_t span = std::uint64_t{1} << 32;
    const std::uint64_t limit = span - span % n;
    for (;;) {
      const std::uint32_t w = next_word();
      if (w < limit) return static_cast<std::uint32_t>(w % n);
    }
  }

 private:
  std::uint8_t next_byte() {
    if (pos_ == block_.size()) refill();
    return block_[pos_++];
  }

  void refill() {
    std::vector<std::uint8_t> msg(seed_.begin(), seed_.end());
    append_be64(msg, counter_++);
    block_ = sha256(msg);
    pos_ = 0;
  }

  Digest seed_;
  Digest block_{};
  std::size_t pos_ = 32;
  std::uint64_t counter_ = 0;
};

}  // namespace

Permutation derive_round_permutation(std::span<const std::uint8_t> key, std::uint64_t round_id,
                                     std::size_t set_size) {
  if (key.empty()) throw ConfigError("assignment key must be non-empty");
  if (set_size == 0) throw ConfigError("set size must be positive");
  if (set_size > 0xffffffffu) throw ConfigError("set size too large for the permutation stream");

  std::vector<std::uint8_t> msg(key.begin(), key.end());
  append_be64(msg, round_id);
  HashStream stream(sha256(msg));

  Permutation perm(set_size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = set_size - 1; i >= 1; --i) {
    const std::size_t j = stream.uniform_below(static_cast<std::uint32_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::size_t assigned_column(const Permutation& perm, std::size_t my_index) {
  if (my_index < 1 || my_index > perm.size()) {
    throw ArgumentError("signature index " + std::to_string(my_index) + " outside 1.." +
                        std::to_string(perm.size()));
  }
  return perm[my_index - 1];
}

std::vector<double> assign_signature(const SpreadingSet& set, const Permutation& perm,
                                     std::size_t my_index) {
  if (perm.size() != set.set_size()) throw ArgumentError("permutation size differs from set size");
  const auto col = set.column(assigned_column(perm, my_index));
  return {col.begin(), col.end()};
}

}  // namespace floras::seqcode
