#include "doctest.h"

#include <cmath>

#include "floras/channel.hpp"
#include "floras/error.hpp"
#include "floras/kernels.hpp"
#include "floras/seqcode.hpp"

using namespace floras;
using namespace floras::channel;

TEST_CASE("per-symbol SNR convention") {
  CHECK(snr_to_sigma2(0, 1, 1) == doctest::Approx(1.0));
  CHECK(snr_to_sigma2(10, 1, 1) == doctest::Approx(0.1));
  CHECK(snr_to_sigma2(15, 1, 4010) == doctest::Approx(7.886e-6).epsilon(1e-3));
  CHECK(snr_to_sigma2(15, 1, 4010) == doctest::Approx(std::pow(10.0, -1.5) / 4010.0).epsilon(1e-12));
  CHECK_THROWS_AS(snr_to_sigma2(0, 1, 0), ArgumentError);
  CHECK_THROWS_AS(snr_to_sigma2(0, 0, 1), ArgumentError);
}

TEST_CASE("unit-pilot SNR convention") {
  CHECK(pilot_snr_to_sigma2(0) == doctest::Approx(1.0));
  CHECK(pilot_snr_to_sigma2(20) == doctest::Approx(0.01));
  CHECK(sigma2_for(SnrReference::unit_pilot, 10, 5, 7) == doctest::Approx(0.1));
  CHECK(sigma2_for(SnrReference::per_symbol, 10, 1, 1) == doctest::Approx(0.1));
}

TEST_CASE("fading has unit mean power") {
  Rng rng(1);
  const auto c = sample_fading(1000000, FadingModel::rayleigh_complex, rng);
  double p = 0.0;
  for (auto h : c.gains) p += std::norm(h);
  p /= c.size();
  CHECK(p >= 0.997);
  CHECK(p <= 1.003);

  const auto r = sample_fading(1000000, FadingModel::real_gaussian, rng);
  double q = 0.0;
  for (auto h : r.gains) {
    REQUIRE(h.imag() == 0.0);
    q += h.real() * h.real();
  }
  q /= r.size();
  CHECK(q >= 0.997);
  CHECK(q <= 1.003);

  CHECK(sample_fading(0, FadingModel::rayleigh_complex, rng).size() == 0);
}

TEST_CASE("effective gains") {
  ChannelRealization c;
  c.gains = {{3.0, 4.0}, {-1.0, 2.0}};
  const auto pc = c.effective_gains(GainMode::phase_corrected);
  CHECK(pc[0] == doctest::Approx(5.0));
  CHECK(pc[1] == doctest::Approx(std::sqrt(5.0)));
  const auto re = c.effective_gains(GainMode::real_part);
  CHECK(re[0] == 3.0);
  CHECK(re[1] == -1.0);
}

TEST_CASE("AWGN per-chip variance and projection") {
  Rng rng(2);
  CHECK(sample_noise_vector(32, 0.0, rng) == std::vector<double>(32, 0.0));
  CHECK_THROWS_AS(sample_noise_vector(4, -1.0, rng), ArgumentError);

  const auto set = seqcode::generate_orthonormal_set(32);
  const auto a = set.column(5);
  const std::size_t reps = 1000000;
  double s2 = 0.0, proj = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const auto n = sample_noise_vector(32, 1.0, rng);
    s2 += n[i % 32] * n[i % 32];
    const double an = kernels::dot(a, n);
    proj += an * an;
  }
  CHECK(s2 / reps == doctest::Approx(1.0 / 32).epsilon(0.02));
  CHECK(proj / reps == doctest::Approx(1.0 / 32).epsilon(0.02));
}
