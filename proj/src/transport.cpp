#include "floras/transport.hpp"

#include <string>

#include "floras/error.hpp"
#include "floras/kernels.hpp"

namespace floras {

std::optional<aircomp::ModelVector> NoiselessTransport::aggregate(
    std::span<const aircomp::ModelVector> normalized, std::uint64_t, Rng&) const {
  if (normalized.empty()) return std::nullopt;
  aircomp::ModelVector out(normalized.front().size(), 0.0);
  for (const auto& v : normalized) kernels::axpy(1.0, v, out);
  return out;
}

FlorasTransport::FlorasTransport(FlorasParams params)
    : params_(std::move(params)), set_(seqcode::generate_orthonormal_set(params_.set_size)) {
  if (params_.key.empty()) throw ConfigError("FLORAS transport needs a non-empty assignment key");
  if (params_.sigma2 < 0.0) throw ConfigError("noise variance must be non-negative");
}

std::optional<aircomp::ModelVector> FlorasTransport::aggregate(
    std::span<const aircomp::ModelVector> normalized, std::uint64_t round, Rng& rng) const {
  const std::size_t k = normalized.size();
  if (k == 0) return std::nullopt;
  if (k > set_.set_size()) {
    throw ConfigError("cohort of " + std::to_string(k) + " exceeds the set size " +
                      std::to_string(set_.set_size()));
  }
  const auto perm = seqcode::derive_round_permutation(params_.key, round, set_.set_size());
  std::vector<std::size_t> columns(k);
  for (std::size_t i = 0; i < k; ++i) columns[i] = seqcode::assigned_column(perm, i + 1);

  const auto fading = channel::sample_fading(k, params_.fading, rng);
  aircomp::FlorasRoundConfig cfg;
  cfg.sigma2 = params_.sigma2;
  cfg.gain_mode = params_.gain_mode;
  if (cfg.sigma2 == 0.0) {
    // Unused sequences estimate to exactly zero without pilot noise; the
    // projector then only spans the used columns.
    const auto gains = fading.effective_gains(cfg.gain_mode);
    std::vector<double> v(set_.chip_length(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (gains[i] == 0.0) throw SingularEstimateError("zero channel gain on a used sequence");
      kernels::axpy(1.0 / gains[i], set_.column(columns[i]), v);
    }
    return aircomp::transmit_and_decode(normalized, set_, columns, gains, v, 0.0, rng);
  }
  return aircomp::floras_round(set_, normalized, columns, fading, cfg, rng).decoded_sum;
}

std::optional<aircomp::ModelVector> AnalyticFlorasTransport::aggregate(
    std::span<const aircomp::ModelVector> normalized, std::uint64_t, Rng& rng) const {
  if (normalized.empty()) return std::nullopt;
  if (normalized.size() > set_size_) throw ConfigError("cohort exceeds the set size");
  return aircomp::analytic_decode(normalized, set_size_ - normalized.size(), rng);
}

ChannelInversionTransport::ChannelInversionTransport(InversionParams params) : params_(params) {
  if (!(params_.threshold > 0.0)) throw ConfigError("fading threshold must be positive");
  if (!(params_.max_power > 0.0)) throw ConfigError("maximum power must be positive");
}

std::optional<aircomp::ModelVector> ChannelInversionTransport::aggregate(
    std::span<const aircomp::ModelVector> normalized, std::uint64_t, Rng& rng) const {
  if (normalized.empty()) return std::nullopt;
  const auto fading = channel::sample_fading(normalized.size(), params_.fading, rng);
  auto res = aircomp::channel_inversion_round(normalized, fading, params_.sigma2,
                                              params_.max_power, params_.threshold, rng);
  if (res.surviving == 0) return std::nullopt;
  return std::move(res.decoded);
}

}  // namespace floras
