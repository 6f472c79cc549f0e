#include "wlks/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "wlks/error.hpp"

namespace wlks {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
  Graph g;
  std::vector<std::pair<NodeId, NodeId>> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw RangeError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") outside [0, " +
                       std::to_string(num_nodes) + ")");
    }
    if (u == v) {
      ++g.dropped_self_loops_;
      continue;
    }
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  const auto last = std::unique(canon.begin(), canon.end());
  g.dropped_duplicates_ = static_cast<std::size_t>(canon.end() - last);
  canon.erase(last, canon.end());

  g.offsets_.assign(num_nodes + 1, 0);
  for (auto [u, v] : canon) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.resize(canon.size() * 2);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : canon) {
    g.neighbors_[cursor[u]++] = v;
    g.neighbors_[cursor[v]++] = u;
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
  }
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Subgraph Subgraph::induced(const GlobalGraph& g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Subgraph s;
  for (NodeId u : nodes) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && std::binary_search(nodes.begin(), nodes.end(), v)) s.edges.emplace_back(u, v);
    }
  }
  s.nodes = std::move(nodes);
  return s;
}

const char* to_string(Split s) noexcept {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

std::vector<std::size_t> SubgraphSet::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

void SubgraphSet::validate(const GlobalGraph& g) const {
  if (labels.size() != subgraphs.size() || split.size() != subgraphs.size()) {
    throw ContractError("subgraph set: labels/split length differs from subgraph count");
  }
  for (std::size_t i = 0; i < subgraphs.size(); ++i) {
    const auto& s = subgraphs[i];
    const std::string where = "subgraph " + std::to_string(i) + ": ";
    if (s.nodes.empty()) throw ContractError(where + "no nodes");
    if (!std::is_sorted(s.nodes.begin(), s.nodes.end()) ||
        std::adjacent_find(s.nodes.begin(), s.nodes.end()) != s.nodes.end()) {
      throw ContractError(where + "nodes must be sorted and unique");
    }
    if (s.nodes.back() >= g.num_nodes()) throw ContractError(where + "node id out of range");
    for (auto [u, v] : s.edges) {
      if (!std::binary_search(s.nodes.begin(), s.nodes.end(), u) ||
          !std::binary_search(s.nodes.begin(), s.nodes.end(), v)) {
        throw ContractError(where + "edge endpoint outside node set");
      }
      if (!g.has_edge(u, v)) throw ContractError(where + "edge missing from global graph");
    }
    if (labels[i].empty()) throw ContractError(where + "no labels");
    for (auto c : labels[i]) {
      if (c >= num_classes) throw ContractError(where + "label id >= class count");
    }
  }
}

std::int64_t LocalGraph::local_of(NodeId global) const noexcept {
  const auto it = std::lower_bound(global_ids.begin(), global_ids.end(), global);
  if (it == global_ids.end() || *it != global) return -1;
  return it - global_ids.begin();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on runs of spaces/tabs and parses every token as an unsigned integer.
bool parse_uints(std::string_view s, std::vector<std::uint64_t>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i == s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, v);
    if (ec != std::errc() || ptr != s.data() + j) return false;
    out.push_back(v);
    i = j;
  }
  return true;
}

}  // namespace

GlobalGraph parse_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::uint64_t> nums;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!have_header) {
      if (body.size() < 2 || body[0] != 'N' || (body[1] != ' ' && body[1] != '\t') ||
          !parse_uints(body.substr(1), nums) || nums.size() != 1) {
        throw ParseError("expected header 'N <count>'", line_no);
      }
      if (nums[0] > 0xFFFFFFFFull) throw RangeError("node count too large", line_no);
      n = static_cast<std::size_t>(nums[0]);
      have_header = true;
      continue;
    }
    if (!parse_uints(body, nums) || nums.size() != 2) {
      throw ParseError("expected 'u v' edge line", line_no);
    }
    if (nums[0] >= n || nums[1] >= n) {
      throw RangeError("node id >= N (" + std::to_string(n) + ")", line_no);
    }
    edges.emplace_back(static_cast<NodeId>(nums[0]), static_cast<NodeId>(nums[1]));
  }
  if (!have_header) throw ParseError("missing header 'N <count>'", line_no);
  return Graph::from_edges(n, edges);
}

GlobalGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path.string(), 0);
  return parse_graph(in);
}

void write_graph(const GlobalGraph& g, std::ostream& out) {
  out << "N " << g.num_nodes() << '\n';
  for (auto [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

std::vector<NodeId> khop_nodes(const GlobalGraph& g, std::span<const NodeId> seeds, std::size_t hops) {
  std::vector<std::uint8_t> seen(g.num_nodes(), 0);
  std::vector<NodeId> frontier;
  std::vector<NodeId> reached;
  for (NodeId s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
      reached.push_back(s);
    }
  }
  std::vector<NodeId> next;
  for (std::size_t h = 0; h < hops && !frontier.empty(); ++h) {
    next.clear();
    for (NodeId u : frontier) {
      for (NodeId v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          next.push_back(v);
          reached.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  std::sort(reached.begin(), reached.end());
  return reached;
}

LocalGraph induced_subgraph(const GlobalGraph& g, std::span<const NodeId> nodes) {
  LocalGraph out;
  out.global_ids.assign(nodes.begin(), nodes.end());
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < out.global_ids.size(); ++i) {
    const NodeId u = out.global_ids[i];
    for (NodeId v : g.neighbors(u)) {
      if (v <= u) continue;
      const auto j = out.local_of(v);
      if (j >= 0) edges.emplace_back(i, static_cast<NodeId>(j));
    }
  }
  out.graph = Graph::from_edges(out.global_ids.size(), edges);
  return out;
}

LocalGraph explicit_subgraph(const Subgraph& sub) {
  LocalGraph out;
  out.global_ids = sub.nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(sub.edges.size());
  for (auto [u, v] : sub.edges) {
    const auto a = out.local_of(u);
    const auto b = out.local_of(v);
    if (a < 0 || b < 0) throw ContractError("subgraph edge endpoint outside node set");
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  out.graph = Graph::from_edges(out.global_ids.size(), edges);
  return out;
}

double density(const Graph& g) {
  const double n = static_cast<double>(g.num_nodes());
  if (n <= 1) return 0.0;
  return static_cast<double>(g.num_edges()) / (n * (n - 1) / 2.0);
}

double cut_ratio(const GlobalGraph& g, std::span<const NodeId> sub_nodes) {
  std::vector<std::uint8_t> inside(g.num_nodes(), 0);
  std::size_t k = 0;
  for (NodeId v : sub_nodes) {
    if (!inside[v]) {
      inside[v] = 1;
      ++k;
    }
  }
  const double denom = static_cast<double>(k) * static_cast<double>(g.num_nodes() - k);
  if (denom == 0) return 0.0;
  std::size_t boundary = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!inside[v]) continue;
    for (NodeId u : g.neighbors(v)) boundary += !inside[u];
  }
  return static_cast<double>(boundary) / denom;
}

std::vector<std::uint32_t> core_numbers(const Graph& g) {
  // Bucket peeling (Batagelj-Zaversnik): nodes kept sorted by current degree.
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> deg(n);
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = static_cast<std::uint32_t>(g.degree(v));
    max_deg = std::max<std::size_t>(max_deg, deg[v]);
  }
  std::vector<std::size_t> bin(max_deg + 2, 0);
  for (auto d : deg) ++bin[d + 1];
  std::partial_sum(bin.begin(), bin.end(), bin.begin());
  std::vector<NodeId> order(n);
  std::vector<std::size_t> pos(n);
  {
    std::vector<std::size_t> start(bin.begin(), bin.end() - 1);
    for (NodeId v = 0; v < n; ++v) {
      pos[v] = start[deg[v]]++;
      order[pos[v]] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = order[i];
    for (NodeId u : g.neighbors(v)) {
      if (deg[u] > deg[v]) {
        const std::uint32_t du = deg[u];
        const std::size_t pu = pos[u];
        const std::size_t pw = bin[du];
        const NodeId w = order[pw];
        if (u != w) {
          order[pu] = w;
          pos[w] = pu;
          order[pw] = u;
          pos[u] = pw;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  return deg;
}

Components connected_components(const Graph& g) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  Components c;
  c.component_of.assign(g.num_nodes(), kUnset);
  std::vector<NodeId> queue;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (c.component_of[s] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(c.count++);
    c.component_of[s] = id;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (NodeId v : g.neighbors(queue[head])) {
        if (c.component_of[v] == kUnset) {
          c.component_of[v] = id;
          queue.push_back(v);
        }
      }
    }
  }
  return c;
}

}  // namespace wlks
