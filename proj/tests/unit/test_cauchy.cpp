#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "floras/cauchy.hpp"
#include "floras/error.hpp"

using namespace floras;
using namespace floras::cauchy;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

double ratio(double x, double theta, double gamma) {
  return (x * x + gamma * gamma) / ((x - theta) * (x - theta) + gamma * gamma);
}

}  // namespace

TEST_CASE("pdf and cdf") {
  const CauchyParams p{0.0, 5.0};
  CHECK(pdf(0.0, p) == doctest::Approx(1.0 / (5.0 * std::numbers::pi)));
  CHECK(pdf(0.0, p) == doctest::Approx(0.063662).epsilon(1e-5));
  CHECK(cdf(0.0, p) == doctest::Approx(0.5));
  CHECK(cdf(5.0, p) == doctest::Approx(0.75));
  CHECK(cdf(3.0, {3.0, 2.0}) == doctest::Approx(0.5));

  const CauchyParams t{1.0, 2.0, 10.0};
  CHECK(pdf(11.5, t) == 0.0);
  CHECK(pdf(-9.5, t) == 0.0);
  CHECK(cdf(-9.0, t) == 0.0);
  CHECK(cdf(11.0, t) == 1.0);
  CHECK(integrate([&](double x) { return pdf(x, t); }, -9.0, 11.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cdf(4.0, t) == doctest::Approx(integrate([&](double x) { return pdf(x, t); }, -9.0, 4.0)).epsilon(1e-10));

  CHECK_THROWS_AS(validate({0.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(validate({0.0, 1.0, 0.0}), ArgumentError);
}

TEST_CASE("truncated quantile") {
  const CauchyParams t{2.0, 3.0, 7.0};
  CHECK(truncated_quantile(0.0, t) == doctest::Approx(2.0));
  CHECK(truncated_quantile(1.0, t) == doctest::Approx(9.0));
  CHECK(truncated_quantile(-1.0, t) == doctest::Approx(-5.0));
  // Inverse of the cdf: cdf(Q(u)) = (u + 1) / 2.
  for (double u : {-0.9, -0.3, 0.25, 0.8}) {
    CHECK(cdf(truncated_quantile(u, t), t) == doctest::Approx((u + 1.0) / 2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(truncated_quantile(0.5, {0.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(truncated_quantile(1.5, t), ArgumentError);

  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = sample_truncated(t, rng);
    REQUIRE(x >= -5.0);
    REQUIRE(x <= 9.0);
  }
}

TEST_CASE("truncated variance") {
  const double v = truncated_variance(5.0, 100.0);
  CHECK(v == doctest::Approx(25.0 * (20.0 - std::atan(20.0)) / std::atan(20.0)).epsilon(1e-14));
  CHECK(v == doctest::Approx(303.766).epsilon(1e-5));

  const CauchyParams p{0.0, 5.0, 100.0};
  const double quad = integrate([&](double x) { return x * x * pdf(x, p); }, -100.0, 100.0);
  CHECK(std::abs(quad - v) <= 1e-6 * v);

  Rng rng(2);
  double s = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_truncated(p, rng);
    s += x * x;
  }
  CHECK(s / n == doctest::Approx(v).epsilon(0.02));

  CHECK(truncated_variance(1.0, 1e-3) < 1e-6);
  CHECK(truncated_variance(1.0, 1e-3) == doctest::Approx(1e-6 / 3.0).epsilon(1e-4));
  CHECK(truncated_variance(1.0, 1e-9) > 0.0);
  double prev = 0.0;
  for (double b : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const double w = truncated_variance(2.0, b);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("likelihood-ratio extrema") {
  const auto z = ratio_extrema(0.0, 3.0);
  CHECK(z.ratio_max == 1.0);
  CHECK(z.ratio_min == 1.0);

  const auto e = ratio_extrema(2.0, 5.0);
  const double s = std::sqrt(104.0);
  CHECK(e.x_max == doctest::Approx((2.0 + s) / 2.0));
  CHECK(e.ratio_max == doctest::Approx((s + 2.0) / (s - 2.0)));
  CHECK(e.ratio_max == doctest::Approx(1.4880).epsilon(1e-4));
  CHECK(e.ratio_max * e.ratio_min == doctest::Approx(1.0));
  CHECK(ratio(e.x_max, 2.0, 5.0) == doctest::Approx(e.ratio_max));
  CHECK(ratio(e.x_min, 2.0, 5.0) == doctest::Approx(e.ratio_min));

  // The ratio at the two modes is attained but is not extremal.
  const auto pub = naive_ratio_extrema(2.0, 5.0);
  CHECK(pub.ratio_max == doctest::Approx(29.0 / 25.0));
  CHECK(pub.ratio_min == doctest::Approx(25.0 / 29.0));
  CHECK(ratio(pub.x_max, 2.0, 5.0) == doctest::Approx(pub.ratio_max));
  CHECK(pub.ratio_max < e.ratio_max);

  // Negative shift mirrors.
  const auto m = ratio_extrema(-2.0, 5.0);
  CHECK(m.ratio_max == doctest::Approx(e.ratio_max));
  CHECK(m.x_max == doctest::Approx(-e.x_max));

  // Grid search.
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 20; ++rep) {
    const double theta = std::uniform_real_distribution<>(-10.0, 10.0)(g);
    const double gamma = std::uniform_real_distribution<>(0.2, 10.0)(g);
    double hi = 0.0, lo = INFINITY;
    for (double x = -1000.0; x <= 1000.0; x += 1e-3) {
      const double r = ratio(x, theta, gamma);
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
    const auto r = ratio_extrema(theta, gamma);
    CAPTURE(theta);
    CAPTURE(gamma);
    CHECK(std::abs(r.ratio_max - hi) <= 1e-6 * hi);
    CHECK(std::abs(r.ratio_min - lo) <= 1e-6);
  }
  CHECK_THROWS_AS(ratio_extrema(1.0, 0.0), ArgumentError);
}

TEST_CASE("Kolmogorov survival") {
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967).epsilon(1e-6));
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.96394524).epsilon(1e-6));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(10.0) < 1e-80);
  // Continuous across the series switch.
  CHECK(kolmogorov_survival(1.1799999) == doctest::Approx(kolmogorov_survival(1.1800001)).epsilon(1e-6));
}

TEST_CASE("KS test") {
  const CauchyParams p{0.0, 1.0};
  auto c = [&](double x) { return cdf(x, p); };
  CHECK_THROWS_AS(ks_test(std::vector<double>(99, 0.0), c), ArgumentError);

  // Statistic equals a brute-force sup over the empirical cdf.
  Rng rng(4);
  std::vector<double> xs(500);
  for (double& x : xs) x = sample(p, rng);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = c(sorted[i]);
    d = std::max({d, double(i + 1) / 500 - f, f - double(i) / 500});
  }
  CHECK(ks_test(xs, c).statistic == doctest::Approx(d).epsilon(1e-14));

  std::vector<double> gauss(10000);
  std::normal_distribution<double> n01;
  for (double& x : gauss) x = n01(rng);
  CHECK(ks_test(gauss, c).p_value < 1e-6);

  // Self-consistency: samples from the reference law rarely fail.
  int pass = 0;
  std::vector<double> ys(100000);
  for (int rep = 0; rep < 100; ++rep) {
    for (double& y : ys) y = sample(p, rng);
    if (ks_test(ys, c).p_value > 0.01) ++pass;
  }
  CHECK(pass >= 99);
}

TEST_CASE("scale adds over independent Cauchy terms") {
  Rng rng(5);
  std::vector<double> xs(50000);
  for (double& x : xs) x = sample({0.0, 2.0}, rng) + sample({0.0, 3.0}, rng);
  const CauchyParams sum{0.0, 5.0};
  CHECK(ks_test(xs, [&](double x) { return cdf(x, sum); }).p_value > 0.01);
}
