#include "floras/cauchy.hpp"

#include <algorithm>
#include <numbers>
#include <vector>

#include "floras/error.hpp"

namespace floras::cauchy {

void validate(const CauchyParams& p) {
  if (!(p.gamma > 0.0)) throw ArgumentError("Cauchy scale must be positive");
  if (!(p.bound > 0.0)) throw ArgumentError("truncation bound must be positive");
}

double pdf(double x, const CauchyParams& p) {
  validate(p);
  const double z = x - p.x0;
  const double base = p.gamma / (std::numbers::pi * (z * z + p.gamma * p.gamma));
  if (!p.truncated()) return base;
  if (std::abs(z) > p.bound) return 0.0;
  return base * std::numbers::pi / (2.0 * std::atan(p.bound / p.gamma));
}

double cdf(double x, const CauchyParams& p) {
  validate(p);
  const double z = x - p.x0;
  if (!p.truncated()) return 0.5 + std::atan(z / p.gamma) / std::numbers::pi;
  if (z <= -p.bound) return 0.0;
  if (z >= p.bound) return 1.0;
  return 0.5 + std::atan(z / p.gamma) / (2.0 * std::atan(p.bound / p.gamma));
}

double truncated_quantile(double u, const CauchyParams& p) {
  validate(p);
  if (!p.truncated()) throw ArgumentError("truncated sampling needs a finite bound");
  if (!(u >= -1.0 && u <= 1.0)) throw ArgumentError("quantile argument must lie in [-1, 1]");
  if (u == 1.0) return p.x0 + p.bound;
  if (u == -1.0) return p.x0 - p.bound;
  const double x = p.gamma * std::tan(u * std::atan(p.bound / p.gamma));
  // tan can overshoot B by an ulp near the endpoints.
  return p.x0 + std::clamp(x, -p.bound, p.bound);
}

double sample_truncated(const CauchyParams& p, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return truncated_quantile(u(rng), p);
}

double sample(const CauchyParams& p, Rng& rng) {
  validate(p);
  std::cauchy_distribution<double> dist(p.x0, p.gamma);
  return dist(rng);
}

double truncated_variance(double gamma, double bound) {
  if (!(gamma > 0.0) || !(bound > 0.0)) throw ArgumentError("gamma and B must be positive");
  const double r = bound / gamma;
  const double a = std::atan(r);
  if (r < 1e-4) {
    // r - atan r = r^3/3 - r^5/5 + ...; the direct form cancels.
    const double r2 = r * r;
    return gamma * gamma * r2 * r * (1.0 / 3.0 - r2 / 5.0 + r2 * r2 / 7.0) / a;
  }
  return gamma * gamma / a * (r - a);
}

RatioExtrema ratio_extrema(double theta, double gamma) {
  if (!(gamma > 0.0)) throw ArgumentError("Cauchy scale must be positive");
  if (theta == 0.0) return {0.0, 1.0, 0.0, 1.0};
  const double s = std::sqrt(theta * theta + 4.0 * gamma * gamma);
  const double at = std::abs(theta);
  const double sign = theta > 0.0 ? 1.0 : -1.0;
  // s - |theta| = 4 gamma^2 / (s + |theta|) avoids cancellation for small theta.
  const double ratio = (s + at) * (s + at) / (4.0 * gamma * gamma);
  return {(theta + sign * s) / 2.0, ratio, (theta - sign * s) / 2.0, 1.0 / ratio};
}

RatioExtrema naive_ratio_extrema(double theta, double gamma) {
  if (!(gamma > 0.0)) throw ArgumentError("Cauchy scale must be positive");
  const double r = (theta * theta + gamma * gamma) / (gamma * gamma);
  return {theta, r, 0.0, 1.0 / r};
}

double kolmogorov_survival(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 1.18) {
    // CDF = sqrt(2 pi)/t sum_k exp(-(2k-1)^2 pi^2 / (8 t^2)), fast for small t.
    const double f = -std::numbers::pi * std::numbers::pi / (8.0 * t * t);
    double cdf_sum = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf_sum += std::exp(m * m * f);
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / t * cdf_sum;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf_fn) {
  if (samples.size() < 100) throw ArgumentError("KS test needs at least 100 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf_fn(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

}  // namespace floras::cauchy
