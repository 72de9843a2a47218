#include <atomic>
#include <cstdlib>
#include <string>

#include "floras/error.hpp"
#include "floras/kernels.hpp"

namespace floras::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(FLORAS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detect_best()};
  return slot;
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                        std::to_string(b) + ")");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa detect_best() {
  if (const char* env = std::getenv("FLORAS_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && supported(Isa::avx2)) return Isa::avx2;
  }
  return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (!supported(isa)) {
    throw ConfigError("kernel variant '" + std::string(isa_name(isa)) + "' is not supported here");
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
#if defined(FLORAS_HAVE_AVX2)
  if (isa == Isa::avx2) {
    if (!supported(Isa::avx2)) throw ConfigError("avx2 kernels are not supported on this CPU");
    return detail::avx2_table();
  }
#else
  if (isa == Isa::avx2) throw ConfigError("avx2 kernels were not compiled in");
#endif
  return detail::scalar_table();
}

namespace {
const KernelTable& current() { return table(active_isa()); }
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size(), "dot");
  return current().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_lengths(x.size(), y.size(), "axpy");
  current().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { current().scale(alpha, x.data(), x.size()); }

double sum(std::span<const double> x) { return current().sum(x.data(), x.size()); }

double sum_squares(std::span<const double> x) {
  return current().sum_squares(x.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  check_lengths(a.size(), rows * cols, "gemv matrix");
  check_lengths(x.size(), cols, "gemv x");
  check_lengths(y.size(), rows, "gemv y");
  current().gemv(a.data(), rows, cols, x.data(), y.data());
}

void clamp(std::span<double> x, double lo, double hi) {
  current().clamp(x.data(), x.size(), lo, hi);
}

}  // namespace floras::kernels
