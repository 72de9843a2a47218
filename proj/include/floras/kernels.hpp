#pragma once

// Dense double-precision kernels behind the simulator's inner loops.
//
// Every kernel has a scalar reference implementation and, on x86-64 hosts
// with AVX2+FMA, a vectorized variant. The active variant is chosen once at
// startup from the CPU feature bits; set FLORAS_ISA=scalar (or avx2) to force
// one, or call kernels::select() from code. Variants agree to rounding error
// only: reductions are reassociated across SIMD lanes.

#include <cstddef>
#include <span>
#include <string_view>

namespace floras::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// True when the variant was compiled in and the running CPU supports it.
bool supported(Isa isa);

// The variant currently used by the free functions below.
Isa active_isa();

// Forces a variant. Throws ConfigError when it is not supported.
void select(Isa isa);

// Best supported variant, overridable through the FLORAS_ISA environment
// variable.
Isa detect_best();

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // y[r] = sum_c a[r * cols + c] * x[c]
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  void (*clamp)(double* x, std::size_t n, double lo, double hi);
};

const KernelTable& table(Isa isa);

// Span-based entry points routed through the active variant. Lengths must
// match; mismatches throw ArgumentError.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
void clamp(std::span<double> x, double lo, double hi);

namespace detail {
const KernelTable& scalar_table();
#if defined(FLORAS_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace floras::kernels
