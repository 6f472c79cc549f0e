#include "wlks/wl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wlks/error.hpp"
#include "wlks/parallel.hpp"

namespace wlks {

std::string Hop::to_string() const {
  return is_global() ? std::string("global") : std::to_string(value_);
}

Hop Hop::parse(std::string_view text) {
  if (text == "global" || text == "GLOBAL" || text == "D") return global();
  std::uint32_t v = 0;
  if (text.empty()) throw ConfigError("empty hop value");
  for (char c : text) {
    if (c < '0' || c > '9') throw ConfigError("invalid hop value '" + std::string(text) + "'");
    v = v * 10 + static_cast<std::uint32_t>(c - '0');
    if (v >= kGlobalValue / 10) throw ConfigError("hop value too large");
  }
  return Hop(v);
}

namespace {

// Per-graph scratch state for one lockstep refinement.
struct RefineState {
  const Graph* graph = nullptr;
  Refinement result;
  std::vector<std::size_t> offsets;
  std::u32string buffer;
  std::vector<NodeId> unknown;
  std::size_t prev_distinct = 0;

  SignatureView signature(NodeId v) const {
    return SignatureView(buffer).substr(offsets[v], offsets[v + 1] - offsets[v]);
  }
};

void build_signatures(RefineState& st, std::size_t iteration, std::span<const std::uint32_t> init) {
  const Graph& g = *st.graph;
  const std::size_t n = g.num_nodes();
  st.offsets.resize(n + 1);
  st.buffer.clear();
  st.offsets[0] = 0;
  if (iteration == 0) {
    for (NodeId v = 0; v < n; ++v) {
      st.buffer.push_back(static_cast<char32_t>(init[v]));
      st.offsets[v + 1] = st.buffer.size();
    }
    return;
  }
  const auto& prev = st.result.iterations[iteration - 1].colors;
  st.buffer.reserve(n + 2 * g.num_edges());
  for (NodeId v = 0; v < n; ++v) {
    st.buffer.push_back(static_cast<char32_t>(prev[v]));
    const std::size_t start = st.buffer.size();
    for (NodeId u : g.neighbors(v)) st.buffer.push_back(static_cast<char32_t>(prev[u]));
    std::sort(st.buffer.begin() + static_cast<std::ptrdiff_t>(start), st.buffer.end());
    st.offsets[v + 1] = st.buffer.size();
  }
}

std::size_t count_distinct(std::vector<ColorId> colors) {
  std::sort(colors.begin(), colors.end());
  return static_cast<std::size_t>(std::unique(colors.begin(), colors.end()) - colors.begin());
}

}  // namespace

std::vector<Refinement> wl_refine_batch(std::span<const Graph* const> graphs,
                                        std::span<const std::vector<std::uint32_t>> init_labels,
                                        std::size_t iterations, ColorTable& table, unsigned threads,
                                        std::span<const std::size_t> schedule) {
  if (init_labels.size() != graphs.size()) {
    throw ContractError("wl_refine_batch: one init label vector per graph required");
  }
  std::vector<std::size_t> order(graphs.size());
  if (schedule.empty()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    if (schedule.size() != graphs.size()) throw ContractError("wl_refine_batch: schedule size mismatch");
    order.assign(schedule.begin(), schedule.end());
  }

  std::vector<RefineState> states(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    states[i].graph = graphs[i];
    if (init_labels[i].size() != graphs[i]->num_nodes()) {
      throw ContractError("wl_refine_batch: init label count differs from node count");
    }
  }

  for (std::size_t it = 0; it <= iterations; ++it) {
    parallel_for(order.size(), threads, [&](std::size_t slot) {
      auto& st = states[order[slot]];
      build_signatures(st, it, init_labels[order[slot]]);
      auto& coloring = st.result.iterations.emplace_back();
      coloring.iteration = it;
      coloring.colors.assign(st.graph->num_nodes(), 0);
      st.unknown.clear();
      for (NodeId v = 0; v < st.graph->num_nodes(); ++v) {
        if (auto id = table.find(it, st.signature(v))) {
          coloring.colors[v] = *id;
        } else {
          st.unknown.push_back(v);
        }
      }
    });

    // Merge point: the only place the shared table grows.
    std::vector<SignatureView> fresh;
    for (const auto& st : states) {
      for (NodeId v : st.unknown) fresh.push_back(st.signature(v));
    }
    if (!fresh.empty()) table.register_new(it, std::move(fresh));

    parallel_for(order.size(), threads, [&](std::size_t slot) {
      auto& st = states[order[slot]];
      auto& colors = st.result.iterations.back().colors;
      for (NodeId v : st.unknown) colors[v] = *table.find(it, st.signature(v));
      const std::size_t distinct = count_distinct(colors);
      if (it > 0 && !st.result.stable_iteration && distinct == st.prev_distinct) {
        st.result.stable_iteration = it - 1;
      }
      st.prev_distinct = distinct;
    });
  }

  std::vector<Refinement> out;
  out.reserve(states.size());
  for (auto& st : states) out.push_back(std::move(st.result));
  return out;
}

Refinement wl_refine(const Graph& g, std::span<const std::uint32_t> init_labels, std::size_t iterations,
                     ColorTable& table) {
  const Graph* graphs[] = {&g};
  std::vector<std::vector<std::uint32_t>> init{std::vector<std::uint32_t>(init_labels.begin(), init_labels.end())};
  return std::move(wl_refine_batch(graphs, init, iterations, table).front());
}

std::uint64_t ColorHistogram::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& [c, n] : bins) t += n;
  return t;
}

NormalizedHistogram normalize_histogram(const ColorHistogram& h) {
  NormalizedHistogram out{h.namespace_id, h.iteration, {}};
  double sq = 0;
  for (const auto& [c, n] : h.bins) sq += static_cast<double>(n) * static_cast<double>(n);
  if (sq == 0) throw ContractError("normalize_histogram: empty histogram");
  const double inv = 1.0 / std::sqrt(sq);
  out.bins.reserve(h.bins.size());
  for (const auto& [c, n] : h.bins) out.bins.emplace_back(c, static_cast<double>(n) * inv);
  return out;
}

GlobalColoringCache::GlobalColoringCache(const GlobalGraph& g, ColorTable& table,
                                         std::vector<std::uint32_t> node_attributes)
    : graph_(&g), table_(&table), attributes_(std::move(node_attributes)) {
  if (!attributes_.empty() && attributes_.size() != g.num_nodes()) {
    throw ContractError("global coloring cache: attribute count differs from node count");
  }
}

const Refinement& GlobalColoringCache::get(std::size_t iterations, unsigned threads) {
  std::lock_guard lock(mutex_);
  if (cached_ && cached_->iterations.size() > iterations) return *cached_;
  std::vector<std::vector<std::uint32_t>> init(1);
  init[0].resize(graph_->num_nodes(), 0);
  for (std::size_t v = 0; v < attributes_.size(); ++v) init[0][v] = attributes_[v] * 2;
  const Graph* graphs[] = {graph_};
  auto fresh = std::make_unique<Refinement>(
      std::move(wl_refine_batch(graphs, init, iterations, *table_, threads).front()));
  ++computations_;
  // Older refinements stay alive: callers may still hold references to them.
  if (cached_) retired_.push_back(std::move(cached_));
  cached_ = std::move(fresh);
  return *cached_;
}

namespace {

std::uint32_t attribute_of(const WlsOptions& opts, NodeId global) {
  return opts.node_attributes.empty() ? 0u : opts.node_attributes[global];
}

}  // namespace

std::vector<SubgraphColoring> wls_colorings(const GlobalGraph& g, std::span<const Subgraph> subs, Hop hop,
                                            const WlsOptions& opts, ColorTable& table,
                                            GlobalColoringCache* cache, std::span<const std::size_t> schedule) {
  if (!opts.node_attributes.empty() && opts.node_attributes.size() != g.num_nodes()) {
    throw ContractError("wls: node attribute count differs from global node count");
  }
  std::vector<SubgraphColoring> out(subs.size());

  if (hop.is_global()) {
    std::unique_ptr<GlobalColoringCache> local;
    if (cache == nullptr) {
      local = std::make_unique<GlobalColoringCache>(g, table, opts.node_attributes);
      cache = local.get();
    }
    const Refinement& ref = cache->get(opts.iterations, opts.threads);
    parallel_for(subs.size(), opts.threads, [&](std::size_t i) {
      auto& sc = out[i];
      sc.nodes = subs[i].nodes;
      sc.colors.resize(opts.iterations + 1);
      for (std::size_t it = 0; it <= opts.iterations; ++it) {
        sc.colors[it].reserve(sc.nodes.size());
        for (NodeId v : sc.nodes) sc.colors[it].push_back(ref.iterations[it].colors[v]);
      }
      sc.stable_iteration = ref.stable_iteration;
      if (sc.stable_iteration && *sc.stable_iteration > opts.iterations) sc.stable_iteration.reset();
    });
    return out;
  }

  // Build the local graph each subgraph is refined on.
  std::vector<LocalGraph> locals(subs.size());
  std::vector<std::vector<std::uint32_t>> init(subs.size());
  parallel_for(subs.size(), opts.threads, [&](std::size_t i) {
    const Subgraph& s = subs[i];
    if (hop.value() == 0) {
      locals[i] = opts.k0_induced ? induced_subgraph(g, s.nodes) : explicit_subgraph(s);
    } else {
      locals[i] = induced_subgraph(g, khop_nodes(g, s.nodes, hop.value()));
    }
    auto& labels = init[i];
    labels.resize(locals[i].global_ids.size());
    for (std::size_t v = 0; v < labels.size(); ++v) {
      const NodeId gid = locals[i].global_ids[v];
      std::uint32_t external = 0;
      if (opts.mark_internal && hop.value() > 0) {
        external = std::binary_search(s.nodes.begin(), s.nodes.end(), gid) ? 0u : 1u;
      }
      labels[v] = attribute_of(opts, gid) * 2 + external;
    }
  });

  std::vector<const Graph*> graphs(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) graphs[i] = &locals[i].graph;
  auto refs = wl_refine_batch(graphs, init, opts.iterations, table, opts.threads, schedule);

  parallel_for(subs.size(), opts.threads, [&](std::size_t i) {
    auto& sc = out[i];
    sc.nodes = subs[i].nodes;
    sc.colors.resize(opts.iterations + 1);
    std::vector<NodeId> local_ids;
    local_ids.reserve(sc.nodes.size());
    for (NodeId v : sc.nodes) local_ids.push_back(static_cast<NodeId>(locals[i].local_of(v)));
    for (std::size_t it = 0; it <= opts.iterations; ++it) {
      sc.colors[it].reserve(sc.nodes.size());
      for (NodeId lv : local_ids) sc.colors[it].push_back(refs[i].iterations[it].colors[lv]);
    }
    sc.stable_iteration = refs[i].stable_iteration;
  });
  return out;
}

HistogramStack histograms_of(const SubgraphColoring& coloring, std::uint64_t namespace_id, std::size_t owner) {
  HistogramStack stack(coloring.colors.size());
  for (std::size_t it = 0; it < coloring.colors.size(); ++it) {
    auto colors = coloring.colors[it];
    std::sort(colors.begin(), colors.end());
    auto& h = stack[it];
    h.namespace_id = namespace_id;
    h.iteration = it;
    h.owner = owner;
    for (std::size_t a = 0; a < colors.size();) {
      std::size_t b = a;
      while (b < colors.size() && colors[b] == colors[a]) ++b;
      h.bins.emplace_back(colors[a], static_cast<std::uint32_t>(b - a));
      a = b;
    }
  }
  return stack;
}

std::vector<HistogramStack> wls_batch(const GlobalGraph& g, std::span<const Subgraph> subs, Hop hop,
                                      const WlsOptions& opts, ColorTable& table, GlobalColoringCache* cache,
                                      std::span<const std::size_t> schedule, std::size_t first_owner) {
  const auto colorings = wls_colorings(g, subs, hop, opts, table, cache, schedule);
  std::vector<HistogramStack> out(colorings.size());
  parallel_for(colorings.size(), opts.threads, [&](std::size_t i) {
    out[i] = histograms_of(colorings[i], table.namespace_id(), first_owner + i);
  });
  return out;
}

HistogramStack wls_k(const Subgraph& sub, const GlobalGraph& g, Hop hop, const WlsOptions& opts,
                     ColorTable& table, GlobalColoringCache* cache) {
  return std::move(wls_batch(g, std::span<const Subgraph>(&sub, 1), hop, opts, table, cache).front());
}

}  // namespace wlks
