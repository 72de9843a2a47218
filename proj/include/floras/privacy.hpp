#pragma once

// Differential-privacy accountant for the Cauchy noise that unused spreading
// sequences inject. gamma = N - K is the Cauchy scale, C the clip norm (the
// global sensitivity is 2C), q the mini-batch sampling rate. Client-level
// accounting is the item-level formula with q = 1.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace floras::privacy {

// c = log(1 + 4 q C^2 / gamma^2), evaluated with log1p.
// Throws ConfigError when gamma <= 0 (no unused sequences, no guarantee) and
// ArgumentError for q outside [0, 1] or C < 0.
double log_term(double q, double clip_norm, double gamma);

// Per-round Renyi DP of order alpha: (1/2) alpha c^2.
double rdp_item_per_round(double alpha, double q, double clip_norm, double gamma);
double rdp_client_per_round(double alpha, double clip_norm, double gamma);

// Per-round pure-DP epsilon_0 = c.
double per_round_pure_epsilon(double q, double clip_norm, double gamma);

// (epsilon', delta) after T rounds via Renyi composition and conversion:
// sqrt(2 T log(1/delta)) c + (T/2) c^2.
double compose_renyi(std::uint64_t rounds, double delta, double c);

// Same quantity obtained by minimizing (T/2) alpha c^2 + log(1/delta)/(alpha-1)
// over alpha > 1 numerically (Brent on log(alpha - 1)).
double compose_renyi_numeric(std::uint64_t rounds, double delta, double c);

// T epsilon_0.
double compose_sequential(std::uint64_t rounds, double eps0);

// sqrt(2 T log(1/delta_tilde)) eps0 + T eps0 (e^eps0 - 1). The per-round
// mechanism is pure DP, so the total failure probability is delta_tilde.
double compose_advanced(std::uint64_t rounds, double delta_tilde, double eps0);

// compose_renyi with the q = 1 log term.
double compose_client_level(std::uint64_t rounds, double delta, double clip_norm, double gamma);

enum class Rule { sequential, advanced, renyi };
std::string_view rule_name(Rule r);
// Throws ArgumentError for an unknown name.
Rule parse_rule(std::string_view name);

struct MechanismParams {
  double clip_norm = 1.0;
  double gamma = 1.0;
  double q = 1.0;
  std::uint64_t rounds = 1;
  double delta = 1e-5;
};

// Throws ConfigError for gamma <= 0, q outside (0, 1], delta outside (0, 1)
// or C < 0.
void validate(const MechanismParams& p);

struct Composed {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct PrivacyLedger {
  double log_term = 0.0;
  double pure_epsilon = 0.0;
  Composed sequential;  // delta is 0: pure composition
  Composed advanced;
  Composed renyi;

  const Composed& get(Rule r) const;
};

PrivacyLedger account(const MechanismParams& p);

struct SetSizeSolution {
  std::size_t set_size = 0;  // N
  double overhead = 0.0;     // rho = N / K - 1
  double epsilon = 0.0;      // achieved epsilon'
};

// Smallest N > K whose item-level Renyi epsilon' after T rounds is at most
// `target`. Throws InfeasibleError when N = 2^16 is still not enough.
SetSizeSolution solve_set_size(double target, std::uint64_t rounds, double delta, double q,
                               double clip_norm, std::size_t cohort);

inline constexpr std::size_t kMaxSetSize = std::size_t{1} << 16;

}  // namespace floras::privacy
