// Serial reference vs OpenMP kernel, same inputs.
#include <benchmark/benchmark.h>

#include <random>

#include "scgan/audio/boaw.h"
#include "scgan/parallel/kernels.h"
#include "scgan/rng.h"

using namespace scgan;

namespace {

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  nn::Matrix m(rows, cols);
  for (double& v : m.values()) v = g(rng);
  return m;
}

parallel::Exec exec_of(const benchmark::State& s) {
  return s.range(0) == 0 ? parallel::Exec::serial : parallel::Exec::omp;
}

void BM_accumulate_blocks(benchmark::State& state) {
  const auto x = random_matrix(1024, 600, 1);
  std::vector<double> out(600);
  const parallel::ItemFn fn = [&](std::size_t i, std::span<double> g) {
    const auto row = x.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      g[j] += row[j];
      s += row[j] * row[j];
    }
    return s;
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::accumulate_blocks(exec_of(state), 1024, fn, out));
  }
}
BENCHMARK(BM_accumulate_blocks)->Arg(0)->Arg(1)->ArgName("omp");

void BM_squared_distances(benchmark::State& state) {
  const auto a = random_matrix(512, 50, 2);
  const auto b = random_matrix(250, 50, 3);
  nn::Matrix out(512, 250);
  for (auto _ : state) {
    if (state.range(0) == 0) {
      parallel::squared_distances_serial(a.view(), b.view(), out.view());
    } else {
      parallel::squared_distances_omp(a.view(), b.view(), out.view());
    }
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_squared_distances)->Arg(0)->Arg(1)->ArgName("omp");

void BM_nearest_rows(benchmark::State& state) {
  const auto pts = random_matrix(512, 50, 4);
  const auto ref = random_matrix(250, 50, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::nearest_rows(exec_of(state), pts.view(), ref.view(), 5));
  }
}
BENCHMARK(BM_nearest_rows)->Arg(0)->Arg(1)->ArgName("omp");

void BM_boaw(benchmark::State& state) {
  const auto frames = random_matrix(400, 50, 6);
  audio::Codebook cb;
  cb.words = random_matrix(250, 50, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(audio::boaw(frames.view(), cb, 5, exec_of(state)));
  }
}
BENCHMARK(BM_boaw)->Arg(0)->Arg(1)->ArgName("omp");

}  // namespace

BENCHMARK_MAIN();
