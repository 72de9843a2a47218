#include <benchmark/benchmark.h>

#include <vector>

#include "floras/kernels.hpp"
#include "floras/rng.hpp"

using namespace floras;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  fill_normal(rng, v, 1.0);
  return v;
}

// state.range(0): 0 scalar, 1 avx2.
const kernels::KernelTable* pick(benchmark::State& state) {
  const auto isa = state.range(0) == 0 ? kernels::Isa::scalar : kernels::Isa::avx2;
  if (!kernels::supported(isa)) {
    state.SkipWithError("variant not supported on this host");
    return nullptr;
  }
  state.SetLabel(std::string(kernels::isa_name(isa)));
  return &kernels::table(isa);
}

void BM_dot(benchmark::State& state) {
  const auto* t = pick(state);
  if (!t) return;
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto a = noise(n, 1), b = noise(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(t->dot(a.data(), b.data(), n));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_axpy(benchmark::State& state) {
  const auto* t = pick(state);
  if (!t) return;
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto x = noise(n, 3);
  auto y = noise(n, 4);
  for (auto _ : state) {
    t->axpy(1e-9, x.data(), y.data(), n);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

// Logistic-regression forward pass: 10 x 400.
void BM_gemv(benchmark::State& state) {
  const auto* t = pick(state);
  if (!t) return;
  const auto a = noise(4000, 5), x = noise(400, 6);
  std::vector<double> y(10);
  for (auto _ : state) {
    t->gemv(a.data(), 10, 400, x.data(), y.data());
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(BM_dot)->ArgsProduct({{0, 1}, {32, 4010}});
BENCHMARK(BM_axpy)->ArgsProduct({{0, 1}, {32, 4010}});
BENCHMARK(BM_gemv)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
