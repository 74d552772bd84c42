// Parallel kernels and fast paths against their serial references.
#include <vector>

#include <benchmark/benchmark.h>

#include "lsinv/dct.hpp"
#include "lsinv/kernels.hpp"
#include "lsinv/levelset.hpp"
#include "lsinv/prior.hpp"
#include "lsinv/reference.hpp"
#include "lsinv/rng.hpp"

namespace {

using namespace lsinv;

std::vector<double> normals(std::size_t len, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> v(len);
  for (auto& x : v) x = rng.normal();
  return v;
}

const LevelSetSpec& spec() {
  static const LevelSetSpec s({-0.05, 0.05}, {7.0, 50.0, 500.0});
  return s;
}

template <auto Fn>
void bm_threshold(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = normals(n * n, 1);
  std::vector<double> kappa(u.size());
  for (auto _ : state) {
    Fn(u, spec(), kappa);
    benchmark::DoNotOptimize(kappa.data());
  }
}

template <auto Fn>
void bm_matvec(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = 1600;
  const auto a = normals(rows * cols, 2);
  const auto x = normals(cols, 3);
  std::vector<double> out(rows);
  for (auto _ : state) {
    Fn(a, rows, cols, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_synthesize_fast(benchmark::State& state) {
  const auto basis = build_basis_laplacian(2.0, Grid(static_cast<std::size_t>(state.range(0))));
  const auto xi = normals(basis.size(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(basis, xi));
}

void bm_synthesize_naive(benchmark::State& state) {
  const auto basis = build_basis_laplacian(2.0, Grid(static_cast<std::size_t>(state.range(0))));
  const auto xi = normals(basis.size(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(reference::naive_kl_sum(basis, xi));
}

}  // namespace

BENCHMARK(bm_threshold<kernels::threshold>)->Name("threshold/parallel")->Arg(40)->Arg(160)->Arg(640);
BENCHMARK(bm_threshold<reference::threshold>)->Name("threshold/serial")->Arg(40)->Arg(160)->Arg(640);
BENCHMARK(bm_matvec<kernels::dense_matvec>)->Name("dense_matvec/parallel")->Arg(64)->Arg(400)->Arg(1600);
BENCHMARK(bm_matvec<reference::dense_matvec>)->Name("dense_matvec/serial")->Arg(64)->Arg(400)->Arg(1600);
BENCHMARK(bm_synthesize_fast)->Name("kl_synthesis/fft")->Arg(20)->Arg(40);
BENCHMARK(bm_synthesize_naive)->Name("kl_synthesis/naive")->Arg(20)->Arg(40);

BENCHMARK_MAIN();
