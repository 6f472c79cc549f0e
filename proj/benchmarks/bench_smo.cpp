#include <benchmark/benchmark.h>

#include <random>

#include "wlks/svm.hpp"

namespace {

wlks::KernelMatrix linear_gram(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> x(n * dim);
  for (auto& v : x) v = nd(rng);
  wlks::KernelMatrix k(n, n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t d = 0; d < dim; ++d) s += x[i * dim + d] * x[j * dim + d];
      k(i, j) = s;
    }
  }
  return k;
}

void BM_SmoBinary(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = linear_gram(n, 5, rng);
  std::vector<int> y(n);
  for (auto& v : y) v = rng() % 2 ? 1 : -1;
  const wlks::BinaryProblem prob{&k, y, static_cast<double>(state.range(1)) / 100.0};
  for (auto _ : state) benchmark::DoNotOptimize(wlks::smo_train(prob));
}
BENCHMARK(BM_SmoBinary)->ArgsProduct({{120, 480}, {8, 128, 2048}})->Unit(benchmark::kMillisecond);

void BM_OneVsRest(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const std::size_t n = 120;
  const auto k = linear_gram(n, 5, rng);
  std::vector<wlks::LabelSet> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back({static_cast<std::uint32_t>(rng() % 3)});
  for (auto _ : state) {
    benchmark::DoNotOptimize(wlks::fit_multiclass(k, labels, 3, 1.28, false, {}, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_OneVsRest)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
