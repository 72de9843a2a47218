#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "floras/error.hpp"
#include "floras/kernels.hpp"

using namespace floras;
using kernels::Isa;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Relative agreement allowing for reassociated sums.
void check_close(double a, double b, double scale) {
  CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, scale));
}

}  // namespace

TEST_CASE("scalar variant is always available") {
  CHECK(kernels::supported(Isa::scalar));
  CHECK(kernels::isa_name(Isa::scalar) == "scalar");
}

TEST_CASE("SIMD variants agree with the scalar reference") {
  if (!kernels::supported(Isa::avx2)) {
    MESSAGE("AVX2 not available on this host; equivalence check skipped");
    return;
  }
  const auto& ref = kernels::table(Isa::scalar);
  const auto& simd = kernels::table(Isa::avx2);
  std::mt19937_64 rng(11);
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 257, 4010}) {
    CAPTURE(n);
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    double abs_dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_dot += std::abs(a[i] * b[i]);

    check_close(ref.dot(a.data(), b.data(), n), simd.dot(a.data(), b.data(), n), abs_dot);
    double abs_sum = 0.0;
    for (double x : a) abs_sum += std::abs(x);
    check_close(ref.sum(a.data(), n), simd.sum(a.data(), n), abs_sum);
    check_close(ref.sum_squares(a.data(), n), simd.sum_squares(a.data(), n),
                ref.sum_squares(a.data(), n));

    auto y1 = b, y2 = b;
    ref.axpy(0.37, a.data(), y1.data(), n);
    simd.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], std::abs(y1[i]) + 1.0);

    auto s1 = a, s2 = a;
    ref.scale(-1.5, s1.data(), n);
    simd.scale(-1.5, s2.data(), n);
    CHECK(s1 == s2);  // one multiply per element: bit-identical

    auto c1 = a, c2 = a;
    ref.clamp(c1.data(), n, -0.5, 0.75);
    simd.clamp(c2.data(), n, -0.5, 0.75);
    CHECK(c1 == c2);
  }

  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{10, 400}, {3, 5}, {1, 1}, {7, 33}}) {
    const auto a = random_vec(rows * cols, rng);
    const auto x = random_vec(cols, rng);
    std::vector<double> y1(rows), y2(rows);
    ref.gemv(a.data(), rows, cols, x.data(), y1.data());
    simd.gemv(a.data(), rows, cols, x.data(), y2.data());
    for (std::size_t r = 0; r < rows; ++r) check_close(y1[r], y2[r], std::abs(y1[r]) + double(cols));
  }
}

TEST_CASE("runtime selection switches the active variant") {
  const Isa before = kernels::active_isa();
  kernels::select(Isa::scalar);
  CHECK(kernels::active_isa() == Isa::scalar);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(kernels::dot(a, b) == 32.0);
  if (kernels::supported(Isa::avx2)) {
    kernels::select(Isa::avx2);
    CHECK(kernels::active_isa() == Isa::avx2);
    CHECK(kernels::dot(a, b) == 32.0);
  } else {
    CHECK_THROWS_AS(kernels::select(Isa::avx2), ConfigError);
  }
  kernels::select(before);
}

TEST_CASE("span wrappers reject length mismatches") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(kernels::dot(a, b), ArgumentError);
  CHECK_THROWS_AS(kernels::axpy(1.0, a, b), ArgumentError);
  std::vector<double> y(2);
  CHECK_THROWS_AS(kernels::gemv(a, 2, 2, std::vector<double>(2), y), ArgumentError);
}
