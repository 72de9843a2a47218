#include "floras/privacy.hpp"

#include <cmath>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "floras/error.hpp"

namespace floras::privacy {

double log_term(double q, double clip_norm, double gamma) {
  if (!(gamma > 0.0)) {
    throw ConfigError("N - K must be positive: with no unused sequences there is no DP guarantee");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("sampling rate must lie in [0, 1]");
  if (!(clip_norm >= 0.0)) throw ArgumentError("clip norm must be non-negative");
  return std::log1p(4.0 * q * clip_norm * clip_norm / (gamma * gamma));
}

double rdp_item_per_round(double alpha, double q, double clip_norm, double gamma) {
  if (!(alpha > 1.0)) throw ArgumentError("Renyi order must exceed 1");
  const double c = log_term(q, clip_norm, gamma);
  return 0.5 * alpha * c * c;
}

double rdp_client_per_round(double alpha, double clip_norm, double gamma) {
  return rdp_item_per_round(alpha, 1.0, clip_norm, gamma);
}

double per_round_pure_epsilon(double q, double clip_norm, double gamma) {
  return log_term(q, clip_norm, gamma);
}

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
}

}  // namespace

double compose_renyi(std::uint64_t rounds, double delta, double c) {
  check_delta(delta);
  if (c < 0.0) throw ArgumentError("log term must be non-negative");
  const double t = static_cast<double>(rounds);
  return std::sqrt(2.0 * t * std::log(1.0 / delta)) * c + 0.5 * t * c * c;
}

double compose_renyi_numeric(std::uint64_t rounds, double delta, double c) {
  check_delta(delta);
  if (c < 0.0) throw ArgumentError("log term must be non-negative");
  if (rounds == 0 || c == 0.0) return 0.0;
  const double half_tc2 = 0.5 * static_cast<double>(rounds) * c * c;
  const double log_inv_delta = std::log(1.0 / delta);
  // alpha = 1 + e^u keeps alpha > 1 and spans the huge range of optima.
  auto objective = [&](double u) {
    const double am1 = std::exp(u);
    return half_tc2 * (1.0 + am1) + log_inv_delta / am1;
  };
  const auto [u, value] = boost::math::tools::brent_find_minima(objective, -60.0, 60.0, 52);
  (void)u;
  return value;
}

double compose_sequential(std::uint64_t rounds, double eps0) {
  if (eps0 < 0.0) throw ArgumentError("epsilon must be non-negative");
  return static_cast<double>(rounds) * eps0;
}

double compose_advanced(std::uint64_t rounds, double delta_tilde, double eps0) {
  check_delta(delta_tilde);
  if (eps0 < 0.0) throw ArgumentError("epsilon must be non-negative");
  const double t = static_cast<double>(rounds);
  return std::sqrt(2.0 * t * std::log(1.0 / delta_tilde)) * eps0 + t * eps0 * std::expm1(eps0);
}

double compose_client_level(std::uint64_t rounds, double delta, double clip_norm, double gamma) {
  return compose_renyi(rounds, delta, log_term(1.0, clip_norm, gamma));
}

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::sequential: return "sequential";
    case Rule::advanced: return "advanced";
    case Rule::renyi: return "renyi";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  if (name == "sequential") return Rule::sequential;
  if (name == "advanced") return Rule::advanced;
  if (name == "renyi") return Rule::renyi;
  throw ArgumentError("unknown composition rule '" + std::string(name) + "'");
}

void validate(const MechanismParams& p) {
  if (!(p.gamma > 0.0)) throw ConfigError("N - K must be positive for a DP guarantee");
  if (!(p.q > 0.0 && p.q <= 1.0)) throw ConfigError("sampling rate q must lie in (0, 1]");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(p.clip_norm >= 0.0)) throw ConfigError("clip norm must be non-negative");
}

const Composed& PrivacyLedger::get(Rule r) const {
  switch (r) {
    case Rule::sequential: return sequential;
    case Rule::advanced: return advanced;
    case Rule::renyi: break;
  }
  return renyi;
}

PrivacyLedger account(const MechanismParams& p) {
  validate(p);
  PrivacyLedger l;
  l.log_term = log_term(p.q, p.clip_norm, p.gamma);
  l.pure_epsilon = l.log_term;
  l.sequential = {compose_sequential(p.rounds, l.pure_epsilon), 0.0};
  l.advanced = {compose_advanced(p.rounds, p.delta, l.pure_epsilon), p.delta};
  l.renyi = {compose_renyi(p.rounds, p.delta, l.log_term), p.delta};
  return l;
}

SetSizeSolution solve_set_size(double target, std::uint64_t rounds, double delta, double q,
                               double clip_norm, std::size_t cohort) {
  if (!(target > 0.0)) throw ArgumentError("target epsilon must be positive");
  if (cohort == 0) throw ArgumentError("cohort size must be positive");
  if (cohort >= kMaxSetSize) throw InfeasibleError("cohort already fills the largest set");
  auto eps_at = [&](std::size_t n) {
    return compose_renyi(rounds, delta, log_term(q, clip_norm, static_cast<double>(n - cohort)));
  };
  if (eps_at(kMaxSetSize) > target) {
    throw InfeasibleError("no N <= 65536 reaches epsilon' <= " + std::to_string(target));
  }
  // epsilon' is non-increasing in N: find the first N that meets the target.
  std::size_t lo = cohort + 1;
  std::size_t hi = kMaxSetSize;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (eps_at(mid) <= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {lo, static_cast<double>(lo) / static_cast<double>(cohort) - 1.0, eps_at(lo)};
}

}  // namespace floras::privacy
