#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "wlks/wl.hpp"

namespace {

wlks::Graph er_graph(std::size_t n, double mean_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto m = static_cast<std::size_t>(mean_degree * static_cast<double>(n) / 2);
  std::vector<std::pair<wlks::NodeId, wlks::NodeId>> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    const auto u = static_cast<wlks::NodeId>(rng() % n), v = static_cast<wlks::NodeId>(rng() % n);
    if (u != v) edges.emplace_back(u, v);
  }
  return wlks::Graph::from_edges(n, edges);
}

std::vector<wlks::Subgraph> subgraphs(const wlks::Graph& g, std::size_t count, std::size_t size) {
  std::mt19937_64 rng(7);
  std::vector<wlks::Subgraph> out;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<wlks::NodeId> nodes;
    for (std::size_t i = 0; i < size; ++i) nodes.push_back(static_cast<wlks::NodeId>(rng() % g.num_nodes()));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    out.push_back(wlks::Subgraph::induced(g, nodes));
  }
  return out;
}

void BM_GlobalRefine(benchmark::State& state) {
  const auto g = er_graph(static_cast<std::size_t>(state.range(0)), 8.0, 1);
  const std::vector<std::uint32_t> labels(g.num_nodes(), 0);
  for (auto _ : state) {
    wlks::ColorTable table;
    benchmark::DoNotOptimize(wlks::wl_refine(g, labels, 3, table));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.num_edges()));
}
BENCHMARK(BM_GlobalRefine)->RangeMultiplier(2)->Range(1 << 12, 1 << 16)->Unit(benchmark::kMillisecond);

void BM_WlsHop(benchmark::State& state) {
  const auto g = er_graph(20000, 8.0, 2);
  const auto subs = subgraphs(g, 150, 20);
  const wlks::Hop hop(static_cast<std::uint32_t>(state.range(0)));
  wlks::WlsOptions opts;
  opts.iterations = 3;
  for (auto _ : state) {
    wlks::ColorTable table;
    benchmark::DoNotOptimize(wlks::wls_batch(g, subs, hop, opts, table));
  }
}
BENCHMARK(BM_WlsHop)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_WlsGlobalThreads(benchmark::State& state) {
  const auto g = er_graph(50000, 8.0, 3);
  const auto subs = subgraphs(g, 150, 20);
  wlks::WlsOptions opts;
  opts.iterations = 3;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    wlks::ColorTable table;
    wlks::GlobalColoringCache cache(g, table);
    benchmark::DoNotOptimize(wlks::wls_batch(g, subs, wlks::Hop::global(), opts, table, &cache));
  }
}
BENCHMARK(BM_WlsGlobalThreads)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
