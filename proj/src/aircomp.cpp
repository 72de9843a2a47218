#include "floras/aircomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "floras/error.hpp"
#include "floras/kernels.hpp"

namespace floras::aircomp {
namespace {

std::size_t common_dimension(std::span<const ModelVector> vectors) {
  if (vectors.empty()) return 0;
  const std::size_t d = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != d) throw ArgumentError("client vectors differ in dimension");
  }
  return d;
}

}  // namespace

Normalized normalize_differential(std::span<const double> x, double clip_norm) {
  if (x.empty()) throw ArgumentError("cannot normalize an empty differential");
  if (!(clip_norm > 0.0)) throw ArgumentError("clip norm must be positive");
  const double mean = kernels::sum(x) / static_cast<double>(x.size());
  ModelVector centered(x.begin(), x.end());
  for (double& v : centered) v -= mean;
  const double norm = std::sqrt(kernels::sum_squares(centered));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DegenerateInputError("differential has no spread around its mean");
  }
  kernels::scale(clip_norm / norm, centered);
  return {std::move(centered), NormParams{mean, norm / clip_norm}};
}

std::vector<double> simulate_pilot_rx(const seqcode::SpreadingSet& set,
                                      std::span<const std::size_t> used_columns,
                                      std::span<const double> effective_gains, double pilot,
                                      double sigma2, Rng& rng) {
  if (used_columns.size() != effective_gains.size()) {
    throw ArgumentError("one gain per used signature is required");
  }
  auto rx = channel::sample_noise_vector(set.chip_length(), sigma2, rng);
  for (std::size_t k = 0; k < used_columns.size(); ++k) {
    kernels::axpy(effective_gains[k] * pilot, set.column(used_columns[k]), rx);
  }
  return rx;
}

std::vector<double> estimate_from_pilot(const seqcode::SpreadingSet& set,
                                        std::span<const double> pilot_rx, double pilot) {
  if (pilot_rx.size() != set.chip_length()) throw ArgumentError("pilot length differs from L");
  if (pilot == 0.0) throw ArgumentError("pilot symbol must be non-zero");
  std::vector<double> est(set.set_size());
  for (std::size_t k = 0; k < est.size(); ++k) est[k] = kernels::dot(set.column(k), pilot_rx) / pilot;
  return est;
}

std::vector<double> estimate_channels(const seqcode::SpreadingSet& set,
                                      std::span<const std::size_t> used_columns,
                                      std::span<const double> effective_gains, double sigma2,
                                      Rng& rng) {
  const auto rx = simulate_pilot_rx(set, used_columns, effective_gains, 1.0, sigma2, rng);
  return estimate_from_pilot(set, rx, 1.0);
}

std::vector<double> build_projector(std::span<const double> estimates,
                                    const seqcode::SpreadingSet& set) {
  if (estimates.size() != set.set_size()) throw ArgumentError("one estimate per sequence required");
  std::vector<double> v(set.chip_length(), 0.0);
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (estimates[k] == 0.0) {
      throw SingularEstimateError("channel estimate " + std::to_string(k) + " is exactly zero");
    }
    kernels::axpy(1.0 / estimates[k], set.column(k), v);
  }
  return v;
}

ModelVector transmit_and_decode(std::span<const ModelVector> client_vectors,
                                const seqcode::SpreadingSet& set,
                                std::span<const std::size_t> used_columns,
                                std::span<const double> effective_gains,
                                std::span<const double> projector, double sigma2, Rng& rng) {
  const std::size_t clients = client_vectors.size();
  if (used_columns.size() != clients || effective_gains.size() != clients) {
    throw ArgumentError("need one signature and one gain per client");
  }
  if (projector.size() != set.chip_length()) throw ArgumentError("projector length differs from L");
  if (sigma2 < 0.0) throw ArgumentError("noise variance must be non-negative");
  const std::size_t dim = common_dimension(client_vectors);
  const std::size_t chips = set.chip_length();
  const double chip_std = std::sqrt(sigma2 / static_cast<double>(chips));

  std::vector<std::span<const double>> signatures;
  signatures.reserve(clients);
  for (std::size_t col : used_columns) signatures.push_back(set.column(col));

  ModelVector decoded(dim);
  std::vector<double> slot_rx(chips);
  for (std::size_t i = 0; i < dim; ++i) {
    fill_normal(rng, slot_rx, chip_std);
    for (std::size_t k = 0; k < clients; ++k) {
      kernels::axpy(effective_gains[k] * client_vectors[k][i], signatures[k], slot_rx);
    }
    decoded[i] = kernels::dot(projector, slot_rx);
  }
  return decoded;
}

ModelVector truncate(std::span<const double> decoded, double bound) {
  if (!(bound > 0.0)) throw ConfigError("truncation bound must be positive");
  ModelVector out(decoded.begin(), decoded.end());
  kernels::clamp(out, -bound, bound);
  return out;
}

void check_truncation_bound(double bound, double clip_norm) {
  if (!(bound > clip_norm)) {
    throw ConfigError("truncation bound B=" + std::to_string(bound) +
                      " must exceed the clip norm C=" + std::to_string(clip_norm));
  }
}

ModelVector denormalize_sum(std::span<const double> decoded, std::span<const NormParams> params) {
  if (params.empty()) throw ArgumentError("de-normalization needs at least one client");
  double scale_sum = 0.0;
  double mean_sum = 0.0;
  for (const auto& p : params) {
    scale_sum += p.scale;
    mean_sum += p.mean;
  }
  const double mean_scale = scale_sum / static_cast<double>(params.size());
  ModelVector out(decoded.size());
  for (std::size_t i = 0; i < decoded.size(); ++i) out[i] = mean_scale * decoded[i] + mean_sum;
  return out;
}

RoundTranscript floras_round(const seqcode::SpreadingSet& set,
                             std::span<const ModelVector> client_vectors,
                             std::span<const std::size_t> used_columns,
                             const channel::ChannelRealization& fading,
                             const FlorasRoundConfig& config, Rng& rng) {
  if (fading.size() != client_vectors.size()) throw ArgumentError("one channel gain per client");
  const auto gains = fading.effective_gains(config.gain_mode);

  RoundTranscript t;
  for (;;) {
    t.pilot_rx = simulate_pilot_rx(set, used_columns, gains, 1.0, config.sigma2, rng);
    t.channel_estimates = estimate_from_pilot(set, t.pilot_rx, 1.0);
    const bool singular = std::any_of(t.channel_estimates.begin(), t.channel_estimates.end(),
                                      [](double h) { return h == 0.0; });
    if (!singular) break;
    if (config.sigma2 == 0.0) {
      // Noiseless pilot with an unused or zero-gain sequence: nothing to redraw.
      throw SingularEstimateError("noiseless pilot leaves a sequence with a zero estimate");
    }
    ++t.pilot_resamples;
  }
  t.projector = build_projector(t.channel_estimates, set);
  t.decoded_sum = transmit_and_decode(client_vectors, set, used_columns, gains, t.projector,
                                      config.sigma2, rng);
  if (config.truncation_bound > 0.0) {
    t.decoded_sum = truncate(t.decoded_sum, config.truncation_bound);
    t.truncation_bound = config.truncation_bound;
  }
  return t;
}

ModelVector analytic_decode(std::span<const ModelVector> client_vectors, std::size_t unused_sequences,
                            Rng& rng) {
  const std::size_t dim = common_dimension(client_vectors);
  ModelVector out(dim, 0.0);
  for (const auto& v : client_vectors) kernels::axpy(1.0, v, out);
  if (unused_sequences > 0) {
    std::cauchy_distribution<double> noise(0.0, static_cast<double>(unused_sequences));
    for (double& x : out) x += noise(rng);
  }
  return out;
}

InversionResult channel_inversion_round(std::span<const ModelVector> client_vectors,
                                        const channel::ChannelRealization& fading, double sigma2,
                                        double max_power, double threshold, Rng& rng) {
  if (!(threshold > 0.0)) throw ArgumentError("fading threshold must be positive");
  if (!(max_power > 0.0)) throw ArgumentError("maximum transmit power must be positive");
  if (fading.size() != client_vectors.size()) throw ArgumentError("one channel gain per client");
  const std::size_t dim = common_dimension(client_vectors);

  std::vector<std::size_t> survivors;
  double min_gain = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fading.size(); ++k) {
    const double mag = std::abs(fading.gains[k]);
    if (mag * mag >= threshold) {
      survivors.push_back(k);
      min_gain = std::min(min_gain, mag);
    }
  }
  InversionResult result;
  result.surviving = survivors.size();
  if (survivors.empty()) return result;

  const double c = std::sqrt(max_power) * min_gain;
  result.power_scale = c;
  // h_k * (x c / h_k) = c x: inversion makes every survivor arrive with gain c.
  ModelVector rx(dim, 0.0);
  for (std::size_t k : survivors) kernels::axpy(c, client_vectors[k], rx);
  std::vector<double> noise(dim);
  fill_normal(rng, noise, std::sqrt(std::max(sigma2, 0.0)));
  kernels::axpy(1.0, noise, rx);
  kernels::scale(static_cast<double>(client_vectors.size()) /
                     (c * static_cast<double>(survivors.size())),
                 rx);
  result.decoded = std::move(rx);
  return result;
}

DecodeResidualSampler::DecodeResidualSampler(const seqcode::SpreadingSet& set, std::size_t clients,
                                             double sigma2, channel::GainMode gain_mode)
    : set_(set),
      clients_(clients),
      gain_mode_(gain_mode),
      pilot_rx_(set.chip_length()),
      slot_rx_(set.chip_length()),
      projector_(set.chip_length()),
      estimates_(set.set_size()),
      gains_(clients) {
  if (clients == 0 || clients > set.set_size()) {
    throw ArgumentError("residual sampler needs 1 <= K <= N");
  }
  if (!(sigma2 > 0.0)) throw ArgumentError("residual sampler needs sigma2 > 0");
  chip_std_ = std::sqrt(sigma2 / static_cast<double>(set.chip_length()));
}

double DecodeResidualSampler::operator()(Rng& rng) {
  // Orthonormal columns are exchangeable, so clients take columns 0..K-1.
  const auto fading = channel::sample_fading(clients_, channel::FadingModel::rayleigh_complex, rng);
  for (std::size_t k = 0; k < clients_; ++k) {
    gains_[k] = gain_mode_ == channel::GainMode::phase_corrected ? std::abs(fading.gains[k])
                                                                 : fading.gains[k].real();
  }
  for (;;) {
    fill_normal(rng, pilot_rx_, chip_std_);
    for (std::size_t k = 0; k < clients_; ++k) kernels::axpy(gains_[k], set_.column(k), pilot_rx_);
    bool singular = false;
    for (std::size_t k = 0; k < estimates_.size(); ++k) {
      estimates_[k] = kernels::dot(set_.column(k), pilot_rx_);
      singular = singular || estimates_[k] == 0.0;
    }
    if (!singular) break;
  }
  std::fill(projector_.begin(), projector_.end(), 0.0);
  for (std::size_t k = 0; k < estimates_.size(); ++k) {
    kernels::axpy(1.0 / estimates_[k], set_.column(k), projector_);
  }
  fill_normal(rng, slot_rx_, chip_std_);
  std::normal_distribution<double> symbol(0.0, 1.0);
  double sent = 0.0;
  for (std::size_t k = 0; k < clients_; ++k) {
    const double x = symbol(rng);
    sent += x;
    kernels::axpy(gains_[k] * x, set_.column(k), slot_rx_);
  }
  return kernels::dot(projector_, slot_rx_) - sent;
}

}  // namespace floras::aircomp
