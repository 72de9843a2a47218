#pragma once

// Uplink transports seen by the training engine. A transport turns the K
// normalized client differentials of one round into the server's estimate of
// their sum; the engine never looks at channel state.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "floras/aircomp.hpp"
#include "floras/channel.hpp"
#include "floras/rng.hpp"
#include "floras/seqcode.hpp"

namespace floras {

class Transport {
 public:
  virtual ~Transport() = default;

  virtual std::string_view name() const = 0;

  // Decoded sum for round `round`, or nullopt when the round is skipped.
  // Implementations hold only read-only state, so one instance may serve
  // concurrent trials as long as each passes its own rng.
  virtual std::optional<aircomp::ModelVector> aggregate(
      std::span<const aircomp::ModelVector> normalized, std::uint64_t round, Rng& rng) const = 0;
};

// Exact sum: the reference FedAvg uplink.
class NoiselessTransport final : public Transport {
 public:
  std::string_view name() const override { return "noiseless"; }
  std::optional<aircomp::ModelVector> aggregate(std::span<const aircomp::ModelVector> normalized,
                                                std::uint64_t round, Rng& rng) const override;
};

struct FlorasParams {
  std::size_t set_size = 0;             // N
  std::vector<std::uint8_t> key;        // pre-shared assignment key
  double sigma2 = 0.0;
  channel::FadingModel fading = channel::FadingModel::rayleigh_complex;
  channel::GainMode gain_mode = channel::GainMode::phase_corrected;
};

// Chip-level orthogonal-sequence uplink. Signatures come from the keyed
// permutation of the round; cohort member i holds index i+1.
class FlorasTransport final : public Transport {
 public:
  explicit FlorasTransport(FlorasParams params);

  std::string_view name() const override { return "floras"; }
  std::optional<aircomp::ModelVector> aggregate(std::span<const aircomp::ModelVector> normalized,
                                                std::uint64_t round, Rng& rng) const override;

  const seqcode::SpreadingSet& spreading_set() const { return set_; }

 private:
  FlorasParams params_;
  seqcode::SpreadingSet set_;
};

// Exact sum plus Cauchy(0, N-K) per element; skips the chips entirely.
class AnalyticFlorasTransport final : public Transport {
 public:
  explicit AnalyticFlorasTransport(std::size_t set_size) : set_size_(set_size) {}

  std::string_view name() const override { return "floras_analytic"; }
  std::optional<aircomp::ModelVector> aggregate(std::span<const aircomp::ModelVector> normalized,
                                                std::uint64_t round, Rng& rng) const override;

 private:
  std::size_t set_size_;
};

struct InversionParams {
  double sigma2 = 0.0;
  double max_power = 1.0;
  double threshold = 0.01;
  channel::FadingModel fading = channel::FadingModel::rayleigh_complex;
};

class ChannelInversionTransport final : public Transport {
 public:
  explicit ChannelInversionTransport(InversionParams params);

  std::string_view name() const override { return "channel_inversion"; }
  std::optional<aircomp::ModelVector> aggregate(std::span<const aircomp::ModelVector> normalized,
                                                std::uint64_t round, Rng& rng) const override;

 private:
  InversionParams params_;
};

}  // namespace floras
