#pragma once

// Cauchy and truncated-Cauchy distributions, the likelihood-ratio extrema
// used in the privacy analysis, and a one-sample Kolmogorov-Smirnov test.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include "floras/rng.hpp"

namespace floras::cauchy {

// Location x0, scale gamma > 0, truncation half-width B (infinity: none).
struct CauchyParams {
  double x0 = 0.0;
  double gamma = 1.0;
  double bound = std::numeric_limits<double>::infinity();

  bool truncated() const { return std::isfinite(bound); }
};

// Throws ArgumentError unless gamma > 0 and B > 0.
void validate(const CauchyParams& p);

// Truncated forms are renormalized by 2 atan(B/gamma) / pi on
// [x0 - B, x0 + B] and are zero outside.
double pdf(double x, const CauchyParams& p);
double cdf(double x, const CauchyParams& p);

// x0 + gamma tan(u atan(B/gamma)) for u in [-1, 1]; the inverse cdf of the
// truncated law. Throws ArgumentError when B is infinite or |u| > 1.
double truncated_quantile(double u, const CauchyParams& p);

// u ~ Uniform(-1, 1) pushed through truncated_quantile.
double sample_truncated(const CauchyParams& p, Rng& rng);

// Untruncated Cauchy(x0, gamma) draw.
double sample(const CauchyParams& p, Rng& rng);

// Second moment of Cauchy(0, gamma) truncated to [-B, B]:
// (gamma^2 / atan(B/gamma)) (B/gamma - atan(B/gamma)).
double truncated_variance(double gamma, double bound);

// Extrema over x of Q(x)/P(x) for P = Cauchy(0, gamma), Q = Cauchy(theta, gamma).
// The ratio is ((x)^2 + gamma^2) / ((x - theta)^2 + gamma^2); its stationary
// points are x = (theta +- s)/2 with s = sqrt(theta^2 + 4 gamma^2), giving
// ratio_max = (s + |theta|)/(s - |theta|) and ratio_min = 1/ratio_max.
// Throws ArgumentError unless gamma > 0.
struct RatioExtrema {
  double x_max;
  double ratio_max;
  double x_min;
  double ratio_min;
};

RatioExtrema ratio_extrema(double theta, double gamma);

// (theta^2 + gamma^2)/gamma^2 at x = theta and its reciprocal at x = 0: the
// ratio evaluated at the two modes. Not the true extrema for theta != 0; kept
// so the gap to ratio_extrema can be reported.
RatioExtrema naive_ratio_extrema(double theta, double gamma);

struct KsResult {
  double statistic;
  double p_value;
};

// One-sample KS test of `samples` against `cdf`. The p-value is the
// asymptotic Kolmogorov tail at sqrt(n) D. Throws ArgumentError for fewer
// than 100 samples. The input is copied and sorted.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

// Survival function of the Kolmogorov distribution, P(K > t).
double kolmogorov_survival(double t);

}  // namespace floras::cauchy
