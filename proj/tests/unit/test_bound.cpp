#include "doctest.h"

#include <cmath>

#include "floras/bound.hpp"
#include "floras/cauchy.hpp"
#include "floras/error.hpp"

using namespace floras;
using namespace floras::bound;

namespace {

BoundParams base() {
  BoundParams p;
  p.mu = 0.5;
  p.smoothness = 2.0;
  p.gamma_gap = 0.1;
  p.grad_bound = 1.0;
  p.client_grad_bounds.assign(40, 1.0);
  p.local_steps = 2;
  p.cohort = 20;
  p.clients = 40;
  p.gamma_shift = 8.0;
  p.clip_norm = 1.0;
  p.truncation = 50.0;
  p.epsilon = 0.8;
  p.w0_dist = 3.0;
  return p;
}

}  // namespace

TEST_CASE("D(eps) example and identity with the truncated variance") {
  const double r = 10.0;
  CHECK(d_epsilon(0.8, 1, 50, 20, 1, 1) ==
        doctest::Approx(64.0 / (400 * 0.64 * std::atan(r)) * (r - std::atan(r))).epsilon(1e-14));
  CHECK(d_epsilon(0.8, 1, 50, 20, 1, 1) == doctest::Approx(1.4494).epsilon(1e-4));
  CHECK(std::isinf(d_epsilon(0.0, 1, 50, 20, 1, 1)));

  for (double eps : {0.01, 0.3, 2.0, 9.0}) {
    for (double c : {0.5, 1.0, 3.0}) {
      const double gamma = 4 * c / eps;
      const double var = cauchy::truncated_variance(gamma, 10 * c);
      const double expect = 4 * var * 9.0 * 4.0 / (20.0 * 20.0 * c * c);
      CAPTURE(eps);
      CAPTURE(c);
      CHECK(d_epsilon(eps, c, 10 * c, 20, 3, 2) == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  double prev = INFINITY;
  for (double eps = 0.01; eps <= 10.0; eps *= 1.3) {
    const double d = d_epsilon(eps, 1, 50, 20, 1, 1);
    CHECK(d < prev);
    prev = d;
  }
  // Tiny argument takes the series branch and stays continuous.
  CHECK(d_epsilon(1e-9, 1, 50, 20, 1, 1) > d_epsilon(1e-8, 1, 50, 20, 1, 1));
}

TEST_CASE("gap and epsilon are reciprocal") {
  CHECK(epsilon_from_gap(1.0, 5.0) == doctest::Approx(0.8));
  CHECK(gap_from_epsilon(1.0, 0.8) == doctest::Approx(5.0));
  CHECK(gap_from_epsilon(2.0, epsilon_from_gap(2.0, 7.0)) == doctest::Approx(7.0));
}

TEST_CASE("sampling term and G") {
  BoundParams p = base();
  p.local_steps = 1;
  CHECK(sampling_term(p, 0.01) == doctest::Approx(20.0 / 39.0 * 4.0 / 20.0 * 1e-4).epsilon(1e-12));
  CHECK(sampling_term(p, 0.01) == doctest::Approx(1.0256e-5).epsilon(1e-4));
  p.clients = 20;
  p.client_grad_bounds.assign(20, 1.0);
  CHECK(sampling_term(p, 0.01) == 0.0);

  // E = 1, M = K, Gamma = 0 and a vanishing D leave the variance term.
  p.gamma_gap = 0.0;
  p.client_grad_bounds = std::vector<double>(20, 0.0);
  for (std::size_t k = 0; k < 20; ++k) p.client_grad_bounds[k] = 0.1 * k;
  p.epsilon = 1e9;
  p.truncation = 1e-6;
  double hk2 = 0.0;
  for (double h : p.client_grad_bounds) hk2 += h * h;
  CHECK(constant_g(p, 0.01) == doctest::Approx(hk2 / 400.0).epsilon(1e-6));

  BoundParams q = base();
  const double g0 = constant_g(q, 0.01);
  q.gamma_gap = 0.2;
  CHECK(constant_g(q, 0.01) > g0);
  q = base();
  q.local_steps = 3;
  CHECK(constant_g(q, 0.01) > g0);
  q = base();
  q.epsilon = 0.4;
  CHECK(constant_g(q, 0.01) > g0);
}

TEST_CASE("convergence bound") {
  const BoundParams p = base();
  double prev = INFINITY;
  for (double t = 1; t < 1e7; t *= 2.0) {
    const double b = convergence_bound(t, p);
    CHECK(b < prev);
    prev = b;
  }
  const double ratio = convergence_bound(2e6, p) / convergence_bound(1e6, p);
  CHECK(std::abs(ratio - 0.5) <= 0.5e-3);

  // G = 0 (no gradients, no noise), gamma_s = 0, unit distance: L / (2t).
  BoundParams z;
  z.smoothness = 3.0;
  z.grad_bound = 0.0;
  z.client_grad_bounds.assign(20, 0.0);
  z.gamma_shift = 0.0;
  z.w0_dist = 1.0;
  z.epsilon = 1.0;
  for (double t : {1.0, 10.0, 1234.0}) CHECK(convergence_bound(t, z) == doctest::Approx(3.0 / (2.0 * t)));

  // Smaller epsilon, larger bound.
  for (double t : {1.0, 100.0, 1e5}) {
    double last = 0.0;
    for (double eps = 10.0; eps >= 0.01; eps /= 1.5) {
      BoundParams q = p;
      q.epsilon = eps;
      const double b = convergence_bound(t, q);
      CHECK(b > last);
      last = b;
    }
  }
  CHECK(learning_rate(p, 2.0) == doctest::Approx(2.0 / (0.5 * 10.0)));
  CHECK_THROWS_AS(convergence_bound(0.5, p), ArgumentError);
}

TEST_CASE("parameter validation") {
  BoundParams p = base();
  CHECK_NOTHROW(validate(p));
  p.mu = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = base();
  p.smoothness = 0.1;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = base();
  p.cohort = 50;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = base();
  p.truncation = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
}
