#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wlks {

using NodeId = std::uint32_t;

/// Simple undirected graph in compressed adjacency form. Neighbor lists are
/// sorted and deduplicated; adjacency is symmetric with no self-loops. Immutable
/// once built, so a single instance can be shared read-only across workers.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list. Self-loops and duplicate (including
  /// reversed) edges are dropped; their counts are available afterwards.
  static Graph from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const noexcept;

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }
  std::size_t dropped_duplicates() const noexcept { return dropped_duplicates_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::size_t dropped_self_loops_ = 0;
  std::size_t dropped_duplicates_ = 0;
};

/// The universe graph every subgraph and k-hop neighborhood is drawn from.
using GlobalGraph = Graph;

/// A subgraph of the global graph: sorted node ids plus an explicit edge list
/// that may be a strict subset of the induced edges.
struct Subgraph {
  std::vector<NodeId> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;

  /// Subgraph whose edge list is every global edge among `nodes`.
  static Subgraph induced(const GlobalGraph& g, std::vector<NodeId> nodes);

  friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

enum class Split : std::uint8_t { kTrain, kVal, kTest };

const char* to_string(Split s) noexcept;

/// M subgraphs with label sets over `num_classes` classes and a split tag each.
struct SubgraphSet {
  std::vector<Subgraph> subgraphs;
  std::vector<std::vector<std::uint32_t>> labels;
  std::vector<Split> split;
  std::size_t num_classes = 0;
  bool multi_label = false;

  std::size_t size() const noexcept { return subgraphs.size(); }
  std::vector<std::size_t> indices(Split s) const;

  /// Throws ContractError if labels/splits are inconsistent with the subgraphs
  /// or any subgraph is not a valid subgraph of g.
  void validate(const GlobalGraph& g) const;

  friend bool operator==(const SubgraphSet&, const SubgraphSet&) = default;
};

/// Graph restricted to a node subset, with the local <-> global id maps.
/// Local id i corresponds to global id global_ids[i]; global_ids is sorted.
struct LocalGraph {
  Graph graph;
  std::vector<NodeId> global_ids;

  /// Local id of a global node, or -1 when absent.
  std::int64_t local_of(NodeId global) const noexcept;
};

/// Reads the edge-list text format: `#` comment lines, a header `N <count>`,
/// then one `u v` pair per line. Throws ParseError / RangeError with line numbers.
GlobalGraph load_graph(const std::filesystem::path& path);
GlobalGraph parse_graph(std::istream& in);
void write_graph(const GlobalGraph& g, std::ostream& out);

/// Nodes within `hops` edges of any seed node (multi-source BFS), sorted.
std::vector<NodeId> khop_nodes(const GlobalGraph& g, std::span<const NodeId> seeds, std::size_t hops);

/// Subgraph of g induced by `nodes` (sorted, valid).
LocalGraph induced_subgraph(const GlobalGraph& g, std::span<const NodeId> nodes);

/// Local graph over sub.nodes using only the subgraph's explicit edges.
LocalGraph explicit_subgraph(const Subgraph& sub);

/// e / (n(n-1)/2); 0 for a single node.
double density(const Graph& g);

/// Boundary edges of sub_nodes over |S|(N-|S|); 0 when the denominator is 0.
double cut_ratio(const GlobalGraph& g, std::span<const NodeId> sub_nodes);

/// k-core numbers via iterative minimum-degree peeling.
std::vector<std::uint32_t> core_numbers(const Graph& g);

struct Components {
  std::size_t count = 0;
  std::vector<std::uint32_t> component_of;
};

Components connected_components(const Graph& g);

}  // namespace wlks
