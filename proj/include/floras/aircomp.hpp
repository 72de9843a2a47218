#pragma once

// Uplink over-the-air aggregation with orthogonal sequences, plus the
// normalization that precedes it and the channel-inversion baseline.
//
// One round of the orthogonal-sequence uplink:
//   1. every participating client sends the common pilot s on its own
//      signature; the server projects the received vector onto all N
//      sequences to get one channel estimate per sequence;
//   2. the server forms the projector v = sum_k a_k / h_hat_k over all N
//      sequences, used or not (it does not know which K are used);
//   3. clients send their normalized differential one element per slot;
//   4. the server decodes slot i as v^T y_i.
// The unused sequences contribute sum_k (a_k^T n_i)/(a_k^T n_s), which is
// Cauchy(0, N-K) distributed.

#include <cstddef>
#include <span>
#include <vector>

#include "floras/channel.hpp"
#include "floras/rng.hpp"
#include "floras/seqcode.hpp"

namespace floras::aircomp {

using ModelVector = std::vector<double>;

// mean: sample mean of the raw differential.
// scale: ||x - mean||_2 / C. Zero flags a client that sent the zero vector.
struct NormParams {
  double mean = 0.0;
  double scale = 0.0;
};

struct Normalized {
  ModelVector values;
  NormParams params;
};

// x_hat = C (x - mean) / ||x - mean||, so ||x_hat|| = C and mean(x_hat) = 0.
// Throws DegenerateInputError when x is constant, ArgumentError when x is
// empty or C <= 0.
Normalized normalize_differential(std::span<const double> x, double clip_norm);

// Received pilot y_s = sum_k a_{col_k} g_k s + n_s, n_s ~ N(0, sigma2/L I).
std::vector<double> simulate_pilot_rx(const seqcode::SpreadingSet& set,
                                      std::span<const std::size_t> used_columns,
                                      std::span<const double> effective_gains, double pilot,
                                      double sigma2, Rng& rng);

// h_hat_k = a_k^T y_s / s for every sequence in the set.
std::vector<double> estimate_from_pilot(const seqcode::SpreadingSet& set,
                                        std::span<const double> pilot_rx, double pilot = 1.0);

// Pilot simulation followed by estimation, with s = 1.
std::vector<double> estimate_channels(const seqcode::SpreadingSet& set,
                                      std::span<const std::size_t> used_columns,
                                      std::span<const double> effective_gains, double sigma2,
                                      Rng& rng);

// v = sum_k a_k / h_hat_k. Throws SingularEstimateError if any estimate is 0.
std::vector<double> build_projector(std::span<const double> estimates,
                                    const seqcode::SpreadingSet& set);

// Steps 3-4 at chip level: y_i = sum_k a_{col_k} g_k x_k[i] + n_i and
// x_tilde[i] = v^T y_i for every slot i.
// Throws ArgumentError on any dimension mismatch.
ModelVector transmit_and_decode(std::span<const ModelVector> client_vectors,
                                const seqcode::SpreadingSet& set,
                                std::span<const std::size_t> used_columns,
                                std::span<const double> effective_gains,
                                std::span<const double> projector, double sigma2, Rng& rng);

// Elementwise clamp to [-B, B]. Throws ConfigError when B <= 0.
ModelVector truncate(std::span<const double> decoded, double bound);

// Throws ConfigError when B <= C.
void check_truncation_bound(double bound, double clip_norm);

// s_bar * x_tilde + (sum_k mean_k) with s_bar the average client scale.
// Exact when every client has the same scale.
ModelVector denormalize_sum(std::span<const double> decoded, std::span<const NormParams> params);

struct RoundTranscript {
  std::vector<double> pilot_rx;
  std::vector<double> channel_estimates;
  std::vector<double> projector;
  ModelVector decoded_sum;
  double truncation_bound = 0.0;  // <= 0 means not truncated
  std::size_t pilot_resamples = 0;
};

struct FlorasRoundConfig {
  double sigma2 = 0.0;
  channel::GainMode gain_mode = channel::GainMode::phase_corrected;
  double truncation_bound = 0.0;  // <= 0 disables truncation
};

// Full four-step round. A zero channel estimate has probability zero under
// continuous noise; if it happens the pilot noise is redrawn.
RoundTranscript floras_round(const seqcode::SpreadingSet& set,
                             std::span<const ModelVector> client_vectors,
                             std::span<const std::size_t> used_columns,
                             const channel::ChannelRealization& fading,
                             const FlorasRoundConfig& config, Rng& rng);

// Shortcut transport: exact sum plus i.i.d. Cauchy(0, N-K) noise per element
// (no noise when N == K). Truncation is left to the caller.
ModelVector analytic_decode(std::span<const ModelVector> client_vectors, std::size_t unused_sequences,
                            Rng& rng);

struct InversionResult {
  ModelVector decoded;        // empty when no client survived
  std::size_t surviving = 0;
  double power_scale = 0.0;   // common scale c
};

// Channel-inversion baseline. Clients with |h|^2 < threshold stay silent.
// Survivors send x_k[i] * c / h_k with c = sqrt(P_max) * min_surviving |h_k|,
// so the weakest survivor spends exactly P_max per normalized symbol. The
// server sees c * sum_k x_k[i] + n_i with n_i ~ N(0, sigma2), divides by c
// and rescales by K / surviving.
InversionResult channel_inversion_round(std::span<const ModelVector> client_vectors,
                                        const channel::ChannelRealization& fading, double sigma2,
                                        double max_power, double threshold, Rng& rng);

// Draws decode residuals x_tilde_i - sum_k x_hat_k^i, one per independent
// round: fresh fading, fresh pilot noise, one data slot carrying random
// N(0,1) symbols. Buffers are reused across draws, so one sampler per thread.
class DecodeResidualSampler {
 public:
  DecodeResidualSampler(const seqcode::SpreadingSet& set, std::size_t clients, double sigma2,
                        channel::GainMode gain_mode = channel::GainMode::phase_corrected);

  double operator()(Rng& rng);

 private:
  const seqcode::SpreadingSet& set_;
  std::size_t clients_;
  double chip_std_;
  channel::GainMode gain_mode_;
  std::vector<double> pilot_rx_;
  std::vector<double> slot_rx_;
  std::vector<double> projector_;
  std::vector<double> estimates_;
  std::vector<double> gains_;
};

}  // namespace floras::aircomp
