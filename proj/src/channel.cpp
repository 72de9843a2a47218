#include "floras/channel.hpp"

#include <cmath>

#include "floras/error.hpp"

namespace floras::channel {

std::vector<double> ChannelRealization::effective_gains(GainMode mode) const {
  std::vector<double> out(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k) {
    out[k] = mode == GainMode::phase_corrected ? std::abs(gains[k]) : gains[k].real();
  }
  return out;
}

double snr_to_sigma2(double snr_db, double clip_norm, std::size_t dim) {
  if (dim == 0) throw ArgumentError("model dimension must be >= 1");
  if (!(clip_norm > 0.0)) throw ArgumentError("clip norm must be positive");
  const double symbol_power = clip_norm * clip_norm / static_cast<double>(dim);
  return symbol_power / std::pow(10.0, snr_db / 10.0);
}

double pilot_snr_to_sigma2(double snr_db) { return 1.0 / std::pow(10.0, snr_db / 10.0); }

double sigma2_for(SnrReference ref, double snr_db, double clip_norm, std::size_t dim) {
  return ref == SnrReference::unit_pilot ? pilot_snr_to_sigma2(snr_db)
                                         : snr_to_sigma2(snr_db, clip_norm, dim);
}

ChannelRealization sample_fading(std::size_t clients, FadingModel model, Rng& rng) {
  ChannelRealization out;
  out.model = model;
  out.gains.resize(clients);
  if (model == FadingModel::rayleigh_complex) {
    std::normal_distribution<double> half(0.0, std::sqrt(0.5));
    for (auto& g : out.gains) {
      const double re = half(rng);
      const double im = half(rng);
      g = {re, im};
    }
  } else {
    std::normal_distribution<double> unit(0.0, 1.0);
    for (auto& g : out.gains) g = {unit(rng), 0.0};
  }
  return out;
}

std::vector<double> sample_noise_vector(std::size_t chip_length, double sigma2, Rng& rng) {
  if (sigma2 < 0.0) throw ArgumentError("noise variance must be non-negative");
  std::vector<double> out(chip_length, 0.0);
  if (chip_length == 0) return out;
  fill_normal(rng, out, std::sqrt(sigma2 / static_cast<double>(chip_length)));
  return out;
}

}  // namespace floras::channel
