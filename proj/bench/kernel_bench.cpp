// Serial reference kernels versus the OpenMP ones, at the paper's sizes.

#include <benchmark/benchmark.h>

#include "corrcs/kernels.hpp"
#include "corrcs/rng.hpp"

using namespace corrcs;

namespace {

Matrix make_matrix(std::size_t m, std::size_t n) {
  Rng rng(1);
  Vector d(m * n);
  fill_gaussian(rng, d);
  return Matrix(m, n, std::move(d));
}

template <bool kParallel>
void BM_gemv(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Matrix a = make_matrix(m, 1000);
  const Vector x(1000, 0.5);
  Vector out(m);
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::gemv(a, x, out);
    } else {
      kernels::reference::gemv(a, x, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m * 1000));
}

template <bool kParallel>
void BM_gemv_t(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Matrix a = make_matrix(m, 1000);
  const Vector y(m, 0.5);
  Vector out(1000);
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::gemv_t(a, y, out);
    } else {
      kernels::reference::gemv_t(a, y, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m * 1000));
}

}  // namespace

BENCHMARK(BM_gemv<false>)->Arg(200)->Arg(600)->Arg(1000);
BENCHMARK(BM_gemv<true>)->Arg(200)->Arg(600)->Arg(1000);
BENCHMARK(BM_gemv_t<false>)->Arg(200)->Arg(600)->Arg(1000);
BENCHMARK(BM_gemv_t<true>)->Arg(200)->Arg(600)->Arg(1000);

BENCHMARK_MAIN();
