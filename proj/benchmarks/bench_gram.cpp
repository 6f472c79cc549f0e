#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "wlks/kernel.hpp"

namespace {

// Synthetic stacks with a Zipf-like color spread, so bins overlap partially.
std::vector<wlks::HistogramStack> stacks(std::size_t m, std::size_t levels, std::size_t bins) {
  std::mt19937_64 rng(11);
  std::vector<wlks::HistogramStack> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < levels; ++t) {
      std::map<wlks::ColorId, std::uint32_t> h;
      for (std::size_t b = 0; b < bins; ++b) ++h[static_cast<wlks::ColorId>((rng() % 64) * (rng() % 64))];
      wlks::ColorHistogram ch;
      ch.iteration = t;
      ch.owner = i;
      ch.bins.assign(h.begin(), h.end());
      out[i].push_back(std::move(ch));
    }
  }
  return out;
}

void BM_Gram(benchmark::State& state) {
  const auto s = stacks(static_cast<std::size_t>(state.range(0)), 4, 20);
  const wlks::GramOptions opts{3, true, state.range(1) != 0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(wlks::gram_from_histograms(s, opts));
}
BENCHMARK(BM_Gram)->ArgsProduct({{150, 600, 2400}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PsdCheck(benchmark::State& state) {
  const auto s = stacks(static_cast<std::size_t>(state.range(0)), 4, 20);
  const auto k = wlks::gram_from_histograms(s, wlks::GramOptions{3, true, false, 1});
  for (auto _ : state) benchmark::DoNotOptimize(wlks::psd_check(k));
}
BENCHMARK(BM_PsdCheck)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
