#include "wlks/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "wlks/error.hpp"

namespace wlks {

const char* to_string(TaskKind k) noexcept {
  switch (k) {
    case TaskKind::kDensity: return "density";
    case TaskKind::kCutRatio: return "cut-ratio";
    case TaskKind::kCoreness: return "coreness";
    case TaskKind::kComponent: return "component";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "density") return TaskKind::kDensity;
  if (text == "cut-ratio" || text == "cut_ratio" || text == "cutratio") return TaskKind::kCutRatio;
  if (text == "coreness") return TaskKind::kCoreness;
  if (text == "component") return TaskKind::kComponent;
  throw ConfigError("unknown task '" + std::string(text) + "'");
}

TaskSpec TaskSpec::defaults(TaskKind kind) {
  TaskSpec s;
  s.task = kind;
  switch (kind) {
    case TaskKind::kDensity:
      s.mean_degree = 16.0;
      break;
    case TaskKind::kCutRatio:
      s.mean_degree = 6.0;
      break;
    case TaskKind::kCoreness:
      // Each node lands in about 1.5 planted structures: enough overlap that
      // the label depends on context outside the subgraph, not so much that
      // the bands wash out.
      s.num_nodes = 2000;
      s.mean_degree = 2.0;
      break;
    case TaskKind::kComponent:
      // Planted pieces are whole components of the global graph, so the graph
      // must hold every subgraph disjointly plus a background.
      s.num_nodes = 4000;
      s.mean_degree = 3.0;
      s.num_classes = 2;
      break;
  }
  return s;
}

void TaskSpec::validate() const {
  if (num_nodes == 0 || num_subgraphs == 0 || min_size == 0) throw ConfigError("task: sizes must be positive");
  if (min_size > max_size) throw ConfigError("task: min_size > max_size");
  if (max_size > num_nodes) throw ConfigError("task: subgraph larger than the global graph");
  if (!(mean_degree >= 0) || mean_degree >= static_cast<double>(num_nodes)) {
    throw ConfigError("task: mean degree out of range");
  }
  if (num_classes < 2) throw ConfigError("task: need at least two classes");
  if (task == TaskKind::kComponent) {
    if (num_classes != 2) throw ConfigError("task: component task has exactly two classes");
    if (num_subgraphs * max_size > num_nodes) {
      throw ConfigError("task: component task needs num_nodes >= num_subgraphs * max_size");
    }
    if (min_size < 6) throw ConfigError("task: component subgraphs need at least 6 nodes");
  }
}

namespace {

// Portable draws on top of the standard-defined mt19937_64 output sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = 1.0 - unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Mutable simple graph used while planting structure.
class DynGraph {
 public:
  explicit DynGraph(std::size_t n) : adj_(n) {}

  std::size_t num_nodes() const { return adj_.size(); }
  bool has(NodeId u, NodeId v) const { return index_.count(edge_key(u, v)) != 0; }
  const std::vector<NodeId>& nbrs(NodeId v) const { return adj_[v]; }
  std::size_t num_edges() const { return edges_.size(); }
  std::pair<NodeId, NodeId> edge(std::size_t i) const { return edges_[i]; }

  bool add(NodeId u, NodeId v) {
    if (u == v || has(u, v)) return false;
    index_.emplace(edge_key(u, v), edges_.size());
    edges_.emplace_back(u, v);
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    return true;
  }

  bool remove(NodeId u, NodeId v) {
    const auto it = index_.find(edge_key(u, v));
    if (it == index_.end()) return false;
    const std::size_t i = it->second;
    index_.erase(it);
    if (i + 1 != edges_.size()) {
      edges_[i] = edges_.back();
      index_[edge_key(edges_[i].first, edges_[i].second)] = i;
    }
    edges_.pop_back();
    erase_one(adj_[u], v);
    erase_one(adj_[v], u);
    return true;
  }

  GlobalGraph freeze() const { return Graph::from_edges(adj_.size(), edges_); }

 private:
  static void erase_one(std::vector<NodeId>& v, NodeId x) {
    auto it = std::find(v.begin(), v.end(), x);
    *it = v.back();
    v.pop_back();
  }

  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

// G(n, m) with m = round(n * mean_degree / 2) distinct uniform edges.
void add_random_edges(DynGraph& g, std::span<const NodeId> nodes, double mean_degree, Rng& rng) {
  const std::size_t n = nodes.size();
  if (n < 2) return;
  const std::size_t max_edges = n * (n - 1) / 2;
  const auto m = std::min<std::size_t>(max_edges, static_cast<std::size_t>(std::llround(n * mean_degree / 2.0)));
  std::size_t added = 0;
  while (added < m) {
    const NodeId u = nodes[rng.below(n)];
    const NodeId v = nodes[rng.below(n)];
    added += g.add(u, v);
  }
}

std::size_t subgraph_size(const TaskSpec& spec, Rng& rng) {
  return spec.min_size + rng.below(spec.max_size - spec.min_size + 1);
}

// Picks `size` distinct nodes, preferring the least used so that memberships spread evenly.
std::vector<NodeId> pick_nodes(std::size_t size, std::vector<std::uint32_t>& usage, Rng& rng) {
  std::vector<NodeId> all(usage.size());
  std::iota(all.begin(), all.end(), NodeId{0});
  rng.shuffle(all);
  std::stable_sort(all.begin(), all.end(), [&](NodeId a, NodeId b) { return usage[a] < usage[b]; });
  all.resize(size);
  for (NodeId v : all) ++usage[v];
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t internal_edges(const DynGraph& g, const std::vector<NodeId>& s) {
  std::size_t e = 0;
  for (NodeId u : s) {
    for (NodeId v : g.nbrs(u)) e += (u < v && std::binary_search(s.begin(), s.end(), v));
  }
  return e;
}

// Equal-frequency class boundaries over the sorted property values; the
// boundary sits halfway between the neighbouring values.
std::vector<double> quantile_thresholds(std::vector<double> values, std::size_t classes) {
  std::sort(values.begin(), values.end());
  std::vector<double> t;
  const std::size_t m = values.size();
  for (std::size_t c = 1; c < classes; ++c) {
    const std::size_t cut = c * m / classes;
    if (cut == 0 || cut >= m) continue;
    t.push_back(0.5 * (values[cut - 1] + values[cut]));
  }
  return t;
}

// Band index b in [0, classes) -> target value in [lo, hi] with jitter inside the band.
double band_target(std::size_t band, std::size_t classes, double lo, double hi, Rng& rng) {
  const double width = (hi - lo) / static_cast<double>(classes);
  const double centre = lo + width * (static_cast<double>(band) + 0.5);
  return centre + (rng.unit() - 0.5) * 0.4 * width;
}

// Degree-preserving swaps that move the internal edge count of S toward `target`.
void rewire_density(DynGraph& g, const std::vector<NodeId>& s, std::size_t target,
                    const std::unordered_set<std::uint64_t>& protected_edges, Rng& rng) {
  auto inside = [&](NodeId v) { return std::binary_search(s.begin(), s.end(), v); };
  auto is_protected = [&](NodeId a, NodeId b) { return protected_edges.count(edge_key(a, b)) != 0; };
  std::size_t e = internal_edges(g, s);
  std::size_t budget = 400 * (target > e ? target - e : e - target) + 1000;
  while (e < target && budget--) {
    // (a,x),(b,y) -> (a,b),(x,y) with a,b inside, x,y outside.
    const NodeId a = s[rng.below(s.size())];
    const NodeId b = s[rng.below(s.size())];
    if (a == b || g.has(a, b) || g.nbrs(a).empty() || g.nbrs(b).empty()) continue;
    const NodeId x = g.nbrs(a)[rng.below(g.nbrs(a).size())];
    const NodeId y = g.nbrs(b)[rng.below(g.nbrs(b).size())];
    if (inside(x) || inside(y) || x == y || g.has(x, y)) continue;
    if (is_protected(a, x) || is_protected(b, y)) continue;
    g.remove(a, x);
    g.remove(b, y);
    g.add(a, b);
    g.add(x, y);
    ++e;
  }
  while (e > target && budget--) {
    // (a,b),(x,y) -> (a,x),(b,y).
    const NodeId a = s[rng.below(s.size())];
    if (g.nbrs(a).empty()) continue;
    const NodeId b = g.nbrs(a)[rng.below(g.nbrs(a).size())];
    if (!inside(b) || is_protected(a, b)) continue;
    const auto [x, y] = g.edge(rng.below(g.num_edges()));
    if (inside(x) || inside(y) || is_protected(x, y)) continue;
    if (g.has(a, x) || g.has(b, y)) continue;
    g.remove(a, b);
    g.remove(x, y);
    g.add(a, x);
    g.add(b, y);
    --e;
  }
}

struct Planted {
  std::vector<std::vector<NodeId>> sets;
  GlobalGraph graph;
};

Planted plant_density(const TaskSpec& spec, Rng& rng) {
  DynGraph g(spec.num_nodes);
  std::vector<NodeId> all(spec.num_nodes);
  std::iota(all.begin(), all.end(), NodeId{0});
  add_random_edges(g, all, spec.mean_degree, rng);
  std::vector<std::uint32_t> usage(spec.num_nodes, 0);
  std::unordered_set<std::uint64_t> protected_edges;
  Planted p;
  for (std::size_t i = 0; i < spec.num_subgraphs; ++i) {
    auto s = pick_nodes(subgraph_size(spec, rng), usage, rng);
    const double pairs = static_cast<double>(s.size() * (s.size() - 1) / 2);
    const double target = band_target(i % spec.num_classes, spec.num_classes, 0.02, 0.42, rng);
    rewire_density(g, s, static_cast<std::size_t>(std::llround(target * pairs)), protected_edges, rng);
    for (NodeId u : s) {
      for (NodeId v : g.nbrs(u)) {
        if (std::binary_search(s.begin(), s.end(), v)) protected_edges.insert(edge_key(u, v));
      }
    }
    p.sets.push_back(std::move(s));
  }
  p.graph = g.freeze();
  return p;
}

Planted plant_cut_ratio(const TaskSpec& spec, Rng& rng) {
  DynGraph g(spec.num_nodes);
  std::vector<NodeId> all(spec.num_nodes);
  std::iota(all.begin(), all.end(), NodeId{0});
  add_random_edges(g, all, spec.mean_degree, rng);
  std::vector<std::uint32_t> usage(spec.num_nodes, 0);
  Planted p;
  for (std::size_t i = 0; i < spec.num_subgraphs; ++i) {
    auto s = pick_nodes(subgraph_size(spec, rng), usage, rng);
    auto inside = [&](NodeId v) { return std::binary_search(s.begin(), s.end(), v); };
    // Near-clique interior.
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        if (rng.unit() < 0.9) g.add(s[a], s[b]);
      }
    }
    // Boundary edges per node drawn from the class band.
    const double per_node = band_target(i % spec.num_classes, spec.num_classes, 0.5, 9.5, rng);
    const auto target = static_cast<std::size_t>(std::llround(per_node * static_cast<double>(s.size())));
    std::size_t boundary = 0;
    for (NodeId u : s) {
      for (NodeId v : g.nbrs(u)) boundary += !inside(v);
    }
    std::size_t budget = 100 * spec.num_nodes;
    while (boundary < target && budget--) {
      const NodeId u = s[rng.below(s.size())];
      const NodeId v = static_cast<NodeId>(rng.below(spec.num_nodes));
      if (!inside(v) && g.add(u, v)) ++boundary;
    }
    while (boundary > target && budget--) {
      const NodeId u = s[rng.below(s.size())];
      if (g.nbrs(u).empty()) continue;
      const NodeId v = g.nbrs(u)[rng.below(g.nbrs(u).size())];
      if (!inside(v) && g.remove(u, v)) --boundary;
    }
    p.sets.push_back(std::move(s));
  }
  p.graph = g.freeze();
  return p;
}

Planted plant_coreness(const TaskSpec& spec, Rng& rng) {
  DynGraph g(spec.num_nodes);
  std::vector<NodeId> all(spec.num_nodes);
  std::iota(all.begin(), all.end(), NodeId{0});
  add_random_edges(g, all, spec.mean_degree, rng);
  std::vector<std::uint32_t> usage(spec.num_nodes, 0);
  Planted p;
  for (std::size_t i = 0; i < spec.num_subgraphs; ++i) {
    auto s = pick_nodes(subgraph_size(spec, rng), usage, rng);
    std::vector<NodeId> order = s;
    rng.shuffle(order);
    const std::size_t n = order.size();
    // Structure strength rises with the band: trees, then ring lattices of
    // growing width, then dense random cores.
    const std::size_t band = i % spec.num_classes;
    const double level = static_cast<double>(band) / static_cast<double>(spec.num_classes - 1);
    if (band == 0) {
      for (std::size_t v = 1; v < n; ++v) g.add(order[v], order[rng.below(v)]);
    } else if (level < 0.75) {
      const std::size_t half_width = 1 + static_cast<std::size_t>(std::llround(level * 3));
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t d = 1; d <= half_width; ++d) g.add(order[v], order[(v + d) % n]);
      }
    } else {
      const double p_edge = 0.5 + 0.4 * level;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          if (rng.unit() < p_edge) g.add(order[a], order[b]);
        }
      }
    }
    p.sets.push_back(std::move(s));
  }
  p.graph = g.freeze();
  return p;
}

Planted plant_component(const TaskSpec& spec, Rng& rng) {
  DynGraph g(spec.num_nodes);
  std::vector<NodeId> ids(spec.num_nodes);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  rng.shuffle(ids);
  std::size_t cursor = 0;
  Planted p;
  for (std::size_t i = 0; i < spec.num_subgraphs; ++i) {
    const std::size_t size = subgraph_size(spec, rng);
    // Even index: one connected piece. Odd: 3..6 pieces of at least 2 nodes.
    std::size_t pieces = 1;
    if (i % 2 == 1) pieces = std::min<std::size_t>(3 + rng.below(4), size / 2);
    std::vector<std::size_t> sizes(pieces, 2);
    for (std::size_t r = 2 * pieces; r < size; ++r) ++sizes[rng.below(pieces)];
    if (pieces == 1) sizes[0] = size;
    std::vector<NodeId> s;
    for (std::size_t piece : sizes) {
      std::vector<NodeId> tree(ids.begin() + static_cast<std::ptrdiff_t>(cursor),
                               ids.begin() + static_cast<std::ptrdiff_t>(cursor + piece));
      cursor += piece;
      for (std::size_t v = 1; v < tree.size(); ++v) g.add(tree[v], tree[rng.below(v)]);
      s.insert(s.end(), tree.begin(), tree.end());
    }
    std::sort(s.begin(), s.end());
    p.sets.push_back(std::move(s));
  }
  // Background graph on the nodes no subgraph uses.
  std::vector<NodeId> rest(ids.begin() + static_cast<std::ptrdiff_t>(cursor), ids.end());
  add_random_edges(g, rest, spec.mean_degree, rng);
  p.graph = g.freeze();
  return p;
}

// Stratified 80/10/10 assignment.
std::vector<Split> stratified_split(const std::vector<std::uint32_t>& label, std::size_t classes, Rng& rng) {
  std::vector<Split> split(label.size(), Split::kTrain);
  for (std::uint32_t c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < label.size(); ++i) {
      if (label[i] == c) members.push_back(i);
    }
    rng.shuffle(members);
    const auto n = members.size();
    const auto n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
    for (std::size_t k = 0; k < n; ++k) {
      if (k < n_val) {
        split[members[k]] = Split::kVal;
      } else if (k < n_val + n_test) {
        split[members[k]] = Split::kTest;
      }
    }
  }
  return split;
}

}  // namespace

double task_property(TaskKind kind, const GlobalGraph& g, const Subgraph& sub) {
  switch (kind) {
    case TaskKind::kDensity:
      return density(induced_subgraph(g, sub.nodes).graph);
    case TaskKind::kCutRatio:
      return cut_ratio(g, sub.nodes);
    case TaskKind::kCoreness: {
      const auto core = core_numbers(g);
      double sum = 0;
      for (NodeId v : sub.nodes) sum += core[v];
      return sum / static_cast<double>(sub.nodes.size());
    }
    case TaskKind::kComponent:
      return static_cast<double>(connected_components(induced_subgraph(g, sub.nodes).graph).count);
  }
  return 0.0;
}

std::uint32_t class_of(double property, const std::vector<double>& thresholds) {
  std::uint32_t c = 0;
  for (double t : thresholds) c += property > t;
  return c;
}

GeneratedTask gen_task(const TaskSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Planted planted;
  switch (spec.task) {
    case TaskKind::kDensity: planted = plant_density(spec, rng); break;
    case TaskKind::kCutRatio: planted = plant_cut_ratio(spec, rng); break;
    case TaskKind::kCoreness: planted = plant_coreness(spec, rng); break;
    case TaskKind::kComponent: planted = plant_component(spec, rng); break;
  }

  GeneratedTask out;
  auto& d = out.data;
  d.graph = std::move(planted.graph);
  const std::size_t m = planted.sets.size();
  d.subgraphs.num_classes = spec.num_classes;
  d.subgraphs.subgraphs.reserve(m);
  for (auto& s : planted.sets) d.subgraphs.subgraphs.push_back(Subgraph::induced(d.graph, std::move(s)));

  std::vector<std::uint32_t> core;
  if (spec.task == TaskKind::kCoreness) core = core_numbers(d.graph);
  out.property.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& sub = d.subgraphs.subgraphs[i];
    if (spec.task == TaskKind::kCoreness) {
      double sum = 0;
      for (NodeId v : sub.nodes) sum += core[v];
      out.property[i] = sum / static_cast<double>(sub.nodes.size());
    } else {
      out.property[i] = task_property(spec.task, d.graph, sub);
    }
  }
  out.thresholds = quantile_thresholds(out.property, spec.num_classes);

  std::vector<std::uint32_t> label(m);
  for (std::size_t i = 0; i < m; ++i) label[i] = class_of(out.property[i], out.thresholds);
  d.subgraphs.labels.resize(m);
  for (std::size_t i = 0; i < m; ++i) d.subgraphs.labels[i] = {label[i]};
  d.subgraphs.split = stratified_split(label, spec.num_classes, rng);

  if (spec.with_features) {
    FeatureMatrix x(d.graph.num_nodes(), 4);
    for (NodeId v = 0; v < d.graph.num_nodes(); ++v) {
      x(v, 0) = static_cast<double>(d.graph.degree(v));
      for (std::size_t j = 1; j < 4; ++j) x(v, j) = rng.normal();
    }
    d.features = std::move(x);
  }
  return out;
}

}  // namespace wlks
