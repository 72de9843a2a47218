#pragma once

// Block-fading multiple-access channel and AWGN.

#include <complex>
#include <cstddef>
#include <vector>

#include "floras/rng.hpp"

namespace floras::channel {

enum class FadingModel { rayleigh_complex, real_gaussian };

// How a client maps its complex gain onto the real signalling dimension.
//   phase_corrected: the client pre-rotates by e^{-j arg h}, so the receiver
//                    sees |h| (needs per-client phase knowledge).
//   real_part:       no rotation; only Re(h) reaches the real dimension.
enum class GainMode { phase_corrected, real_part };

// One gain per participating client, held fixed for every slot of a round.
struct ChannelRealization {
  std::vector<std::complex<double>> gains;
  FadingModel model = FadingModel::rayleigh_complex;

  std::size_t size() const { return gains.size(); }
  std::vector<double> effective_gains(GainMode mode) const;
};

// Reference power that an SNR in dB is measured against.
//   unit_pilot: sigma^2 = 1 / 10^(snr/10). The common pilot s = 1 and unit
//               mean channel gain give unit received pilot power; data
//               symbols of a norm-C differential carry C^2/d per slot on top.
//   per_symbol: sigma^2 = (C^2/d) / 10^(snr/10). SNR is the average per-slot
//               data-symbol power over the noise power.
enum class SnrReference { unit_pilot, per_symbol };

// Per-symbol convention: sigma^2 = (C^2 / d) / 10^(snr_db / 10).
// Throws ArgumentError unless d >= 1 and C > 0.
double snr_to_sigma2(double snr_db, double clip_norm, std::size_t dim);

// Unit-pilot convention: sigma^2 = 1 / 10^(snr_db / 10).
double pilot_snr_to_sigma2(double snr_db);

double sigma2_for(SnrReference ref, double snr_db, double clip_norm, std::size_t dim);

// K i.i.d. gains; rayleigh_complex draws CN(0,1), real_gaussian draws N(0,1).
ChannelRealization sample_fading(std::size_t clients, FadingModel model, Rng& rng);

// Length-L AWGN vector with per-chip variance sigma2 / L.
std::vector<double> sample_noise_vector(std::size_t chip_length, double sigma2, Rng& rng);

}  // namespace floras::channel
