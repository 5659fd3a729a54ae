// Parallel/FFT kernels vs their serial reference implementations.
#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "wskit/rng.hpp"
#include "wskit/stats.hpp"

namespace {

// AR(1)-smoothed positive noise: enough structure that the estimators do
// real work, cheap enough to regenerate per size
std::vector<double> make_series(std::size_t n) {
  wskit::rng r(1);
  std::vector<double> v(n);
  double prev = 0.0;
  for (auto& x : v) {
    prev = 0.7 * prev + r.exponential(1.0);
    x = prev;
  }
  return v;
}

void bm_peng_parallel(benchmark::State& state) {
  const auto v = make_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto res = wskit::peng_curve(v);
    benchmark::DoNotOptimize(res);
  }
}

void bm_peng_serial(benchmark::State& state) {
  const auto v = make_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto res = wskit::reference::peng_curve(v);
    benchmark::DoNotOptimize(res);
  }
}

void bm_periodogram_fft(benchmark::State& state) {
  const auto v = make_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto res = wskit::periodogram(v);
    benchmark::DoNotOptimize(res);
  }
}

void bm_periodogram_reference(benchmark::State& state) {
  const auto v = make_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto res = wskit::reference::periodogram(v);
    benchmark::DoNotOptimize(res);
  }
}

}  // namespace

BENCHMARK(bm_peng_serial)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_peng_parallel)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_periodogram_reference)->Arg(1 << 12)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_periodogram_fft)->Arg(1 << 12)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
