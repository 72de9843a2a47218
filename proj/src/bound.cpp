#include "floras/bound.hpp"

#include <cmath>
#include <limits>

#include "floras/error.hpp"

namespace floras::bound {

void validate(const BoundParams& p) {
  if (!(p.mu > 0.0)) throw ConfigError("mu must be positive");
  if (!(p.smoothness >= p.mu)) throw ConfigError("smoothness L must be at least mu");
  if (p.gamma_gap < 0.0 || p.grad_bound < 0.0 || p.w0_dist < 0.0) {
    throw ConfigError("Gamma, H and ||w0 - w*||^2 must be non-negative");
  }
  for (double h : p.client_grad_bounds) {
    if (h < 0.0) throw ConfigError("per-client gradient bounds must be non-negative");
  }
  if (p.cohort == 0 || p.cohort > p.clients) throw ConfigError("need 1 <= K <= M");
  if (p.local_steps == 0) throw ConfigError("E must be at least 1");
  if (!(p.clip_norm > 0.0) || !(p.truncation > 0.0)) throw ConfigError("C and B must be positive");
  if (p.gamma_shift < 0.0) throw ConfigError("learning-rate shift must be non-negative");
  if (p.epsilon < 0.0) throw ConfigError("epsilon must be non-negative");
}

double d_epsilon(double eps, double clip_norm, double truncation, std::size_t cohort,
                 std::size_t local_steps, double grad_bound) {
  if (eps == 0.0) return std::numeric_limits<double>::infinity();
  if (eps < 0.0 || !(clip_norm > 0.0) || !(truncation > 0.0) || cohort == 0) {
    throw ArgumentError("D(eps) needs eps, C, B, K > 0");
  }
  const double r = truncation * eps / (4.0 * clip_norm);
  const double a = std::atan(r);
  const double k = static_cast<double>(cohort);
  const double e = static_cast<double>(local_steps);
  // r - atan r loses everything to cancellation for tiny r.
  const double gap = r < 1e-4 ? r * r * r * (1.0 / 3.0 - r * r / 5.0) : r - a;
  return 64.0 / (k * k * eps * eps * a) * gap * e * e * grad_bound * grad_bound;
}

double epsilon_from_gap(double clip_norm, double gap) {
  if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
  return 4.0 * clip_norm / gap;
}

double gap_from_epsilon(double clip_norm, double eps) {
  if (!(eps > 0.0)) return std::numeric_limits<double>::infinity();
  return 4.0 * clip_norm / eps;
}

double sampling_term(const BoundParams& p, double eta) {
  if (p.clients <= 1 || p.clients == p.cohort) return 0.0;
  const double m = static_cast<double>(p.clients);
  const double k = static_cast<double>(p.cohort);
  const double e = static_cast<double>(p.local_steps);
  return (m - k) / (m - 1.0) * (4.0 / k) * eta * eta * e * e * p.grad_bound * p.grad_bound;
}

double constant_g(const BoundParams& p, double eta) {
  validate(p);
  const double m = static_cast<double>(p.clients);
  double hk = 0.0;
  for (double h : p.client_grad_bounds) hk += h * h;
  const double e1 = static_cast<double>(p.local_steps) - 1.0;
  return hk / (m * m) + 6.0 * p.smoothness * p.gamma_gap +
         8.0 * e1 * e1 * p.grad_bound * p.grad_bound + sampling_term(p, eta) +
         d_epsilon(p.epsilon, p.clip_norm, p.truncation, p.cohort, p.local_steps, p.grad_bound);
}

double learning_rate(const BoundParams& p, double t) { return 2.0 / (p.mu * (t + p.gamma_shift)); }

double convergence_bound(double t, const BoundParams& p) {
  if (!(t >= 1.0)) throw ArgumentError("bound is defined for t >= 1");
  const double g = constant_g(p, learning_rate(p, t));
  return p.smoothness / (2.0 * (t + p.gamma_shift)) *
         (4.0 * g / (p.mu * p.mu) + (1.0 + p.gamma_shift) * p.w0_dist);
}

}  // namespace floras::bound
