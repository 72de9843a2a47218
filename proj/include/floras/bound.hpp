#pragma once

// Convergence bound for FedAvg with partial participation, truncated Cauchy
// aggregation noise and a decaying learning rate eta_t = 2 / (mu (t + gamma_s)).

#include <cstddef>
#include <vector>

namespace floras::bound {

struct BoundParams {
  double mu = 1.0;          // strong convexity
  double smoothness = 1.0;  // L
  double gamma_gap = 0.0;   // non-IID gap Gamma
  double grad_bound = 1.0;  // H
  std::vector<double> client_grad_bounds;  // H_k, one per client (M entries)
  std::size_t local_steps = 1;             // E
  std::size_t cohort = 20;                 // K
  std::size_t clients = 20;                // M
  double gamma_shift = 1.0;                // gamma_s
  double clip_norm = 1.0;                  // C
  double truncation = 10.0;                // B
  double epsilon = 1.0;
  double w0_dist = 1.0;                    // ||w_0 - w*||^2
};

// Throws ConfigError for mu <= 0, L < mu, negative bounds, K > M, K == 0,
// E == 0 or C, B <= 0.
void validate(const BoundParams& p);

// D(eps) = 64 / (K^2 eps^2 atan(B eps / 4C)) (B eps / 4C - atan(B eps / 4C)) E^2 H^2.
// Returns +infinity at eps == 0.
double d_epsilon(double eps, double clip_norm, double truncation, std::size_t cohort,
                 std::size_t local_steps, double grad_bound);

// Protocol bridge: the Cauchy scale N - K corresponds to eps = 4C / (N - K).
double epsilon_from_gap(double clip_norm, double gap);
double gap_from_epsilon(double clip_norm, double eps);

// (M - K)/(M - 1) (4/K) eta^2 E^2 H^2, zero when M == K or M == 1.
double sampling_term(const BoundParams& p, double eta);

// G = sum H_k^2 / M^2 + 6 L Gamma + 8 (E-1)^2 H^2 + sampling_term + D(eps).
double constant_g(const BoundParams& p, double eta);

double learning_rate(const BoundParams& p, double t);

// L / (2 (t + gamma_s)) (4 G / mu^2 + (1 + gamma_s) ||w_0 - w*||^2), with
// G evaluated at eta_t. Throws ArgumentError for t < 1.
double convergence_bound(double t, const BoundParams& p);

}  // namespace floras::bound
