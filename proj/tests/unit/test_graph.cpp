#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wlks/error.hpp"
#include "wlks/graph.hpp"

using namespace wlks;

namespace {

Graph make(std::size_t n, std::vector<std::pair<NodeId, NodeId>> e) { return Graph::from_edges(n, e); }

Graph from_dense(const oracle::DenseGraph& d) { return Graph::from_edges(d.n, oracle::edge_pairs(d)); }

Graph cycle(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 0; v < n; ++v) e.emplace_back(v, static_cast<NodeId>((v + 1) % n));
  return make(n, e);
}

std::vector<NodeId> to_ids(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("parse: path of three nodes") {
  std::istringstream in("N 3\n0 1\n1 2\n");
  const auto g = parse_graph(in);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  const auto nb = g.neighbors(1);
  CHECK(std::vector<NodeId>(nb.begin(), nb.end()) == std::vector<NodeId>{0, 2});
}

TEST_CASE("parse: reversed duplicate collapses") {
  std::istringstream in("N 2\n0 1\n1 0\n");
  const auto g = parse_graph(in);
  CHECK(g.num_edges() == 1);
  CHECK(g.dropped_duplicates() == 1);
}

TEST_CASE("parse: node id beyond N reports line 2") {
  std::istringstream in("N 2\n0 5\n");
  try {
    parse_graph(in);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse: malformed line carries its line number") {
  std::istringstream in("# comment\nN 4\n0 1\n2 x\n");
  try {
    parse_graph(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("parse: missing header is an error") {
  std::istringstream in("0 1\n");
  CHECK_THROWS_AS(parse_graph(in), ParseError);
}

TEST_CASE("parse: self-loops dropped and counted, isolated nodes kept") {
  std::istringstream in("# a comment\nN 5\n0 0\n1 2\n3 3\n");
  const auto g = parse_graph(in);
  CHECK(g.num_nodes() == 5);
  CHECK(g.num_edges() == 1);
  CHECK(g.dropped_self_loops() == 2);
}

TEST_CASE("write then parse is the identity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = from_dense(oracle::random_graph(15, 0.2, rng));
    std::stringstream s;
    write_graph(g, s);
    CHECK(parse_graph(s) == g);
  }
}

TEST_CASE("adjacency invariants hold on random edge lists") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<NodeId> pick(0, 29);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int i = 0; i < 200; ++i) edges.emplace_back(pick(rng), pick(rng));
  const auto g = make(30, edges);
  std::size_t total = 0;
  for (NodeId v = 0; v < 30; ++v) {
    const auto nb = g.neighbors(v);
    total += nb.size();
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
    for (NodeId u : nb) {
      CHECK(u != v);
      CHECK(g.has_edge(u, v));
    }
  }
  CHECK(total == 2 * g.num_edges());
  CHECK_THROWS_AS(make(3, {{0, 3}}), RangeError);
}

TEST_CASE("khop: hand-checked cases") {
  const auto path = make(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<NodeId> seed{0};
  CHECK(khop_nodes(path, seed, 2) == std::vector<NodeId>{0, 1, 2});
  const std::vector<NodeId> s{1, 3};
  CHECK(khop_nodes(path, s, 0) == s);

  const auto star = make(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const std::vector<NodeId> leaf{1};
  CHECK(khop_nodes(star, leaf, 2) == std::vector<NodeId>{0, 1, 2, 3, 4, 5});
  CHECK(khop_nodes(star, leaf, 1) == std::vector<NodeId>{0, 1});
}

TEST_CASE("khop: matches all-pairs shortest paths, monotone, saturates at components") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 9);
    const auto d = oracle::random_graph(n, 0.25, rng);
    const auto g = from_dense(d);
    std::vector<int> seeds;
    for (int v = 0; v < n; ++v) {
      if (rng() % 4 == 0) seeds.push_back(v);
    }
    if (seeds.empty()) seeds.push_back(0);
    const auto ids = to_ids(seeds);
    std::vector<NodeId> prev;
    for (int k = 0; k <= n; ++k) {
      const auto got = khop_nodes(g, ids, k);
      CHECK(got == to_ids(oracle::khop(d, seeds, k)));
      CHECK(std::includes(got.begin(), got.end(), prev.begin(), prev.end()));
      prev = got;
    }
    // k = N reaches exactly the components that contain a seed.
    const auto comps = connected_components(g);
    std::vector<NodeId> expected;
    for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
      for (NodeId s : ids) {
        if (comps.component_of[v] == comps.component_of[s]) {
          expected.push_back(v);
          break;
        }
      }
    }
    CHECK(prev == expected);
  }
}

TEST_CASE("induced subgraph: examples") {
  const auto tri = make(3, {{0, 1}, {1, 2}, {0, 2}});
  const std::vector<NodeId> two{0, 1};
  const auto sub = induced_subgraph(tri, two);
  CHECK(sub.graph.num_nodes() == 2);
  CHECK(sub.graph.num_edges() == 1);

  const std::vector<NodeId> all{0, 1, 2};
  const auto whole = induced_subgraph(tri, all);
  CHECK(whole.graph == tri);
  CHECK(whole.global_ids == all);
  CHECK(whole.local_of(2) == 2);

  const auto c6 = cycle(6);
  const std::vector<NodeId> even{0, 2, 4};
  const auto iso = induced_subgraph(c6, even);
  CHECK(iso.graph.num_nodes() == 3);
  CHECK(iso.graph.num_edges() == 0);
  CHECK(iso.local_of(1) == -1);
}

TEST_CASE("induced subgraph commutes with node relabeling") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 10;
    const auto d = oracle::random_graph(n, 0.35, rng);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<NodeId, NodeId>> pe;
    for (auto [u, v] : oracle::edge_pairs(d)) pe.emplace_back(perm[u], perm[v]);
    const auto g = from_dense(d);
    const auto gp = make(n, pe);

    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
      if (rng() % 2) nodes.push_back(v);
    }
    std::vector<NodeId> mapped;
    for (auto v : nodes) mapped.push_back(perm[v]);
    std::sort(mapped.begin(), mapped.end());
    const auto a = induced_subgraph(g, nodes);
    const auto b = induced_subgraph(gp, mapped);
    REQUIRE(a.graph.num_edges() == b.graph.num_edges());
    for (auto [u, v] : a.graph.edge_list()) {
      const auto gu = perm[a.global_ids[u]];
      const auto gv = perm[a.global_ids[v]];
      CHECK(b.graph.has_edge(static_cast<NodeId>(b.local_of(gu)), static_cast<NodeId>(b.local_of(gv))));
    }
  }
}

TEST_CASE("explicit subgraph keeps only the listed edges") {
  const auto k4 = make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  Subgraph s{{1, 2, 3}, {{1, 2}}};
  const auto local = explicit_subgraph(s);
  CHECK(local.graph.num_edges() == 1);
  CHECK(local.graph.has_edge(0, 1));
  CHECK(Subgraph::induced(k4, {3, 1, 2}).edges.size() == 3);
  CHECK(Subgraph::induced(k4, {3, 1, 2}).nodes == std::vector<NodeId>{1, 2, 3});
}

TEST_CASE("density: examples and exhaustive pair count") {
  CHECK(density(make(3, {{0, 1}, {1, 2}, {0, 2}})) == 1.0);
  CHECK(density(make(3, {})) == 0.0);
  CHECK(density(make(4, {{0, 1}, {1, 2}, {2, 3}})) == 0.5);
  CHECK(density(make(1, {})) == 0.0);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const auto d = oracle::random_graph(n, 0.4, rng);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    CHECK(density(from_dense(d)) == doctest::Approx(oracle::density(d, all)).epsilon(1e-12));
  }
}

TEST_CASE("cut ratio: examples and exhaustive edge scan") {
  const auto two = make(5, {{0, 1}, {2, 3}, {3, 4}});
  const std::vector<NodeId> comp{0, 1};
  CHECK(cut_ratio(two, comp) == 0.0);
  const auto star = make(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const std::vector<NodeId> centre{0};
  CHECK(cut_ratio(star, centre) == doctest::Approx(5.0 / 5.0));
  const std::vector<NodeId> everyone{0, 1, 2, 3, 4, 5};
  CHECK(cut_ratio(star, everyone) == 0.0);

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = oracle::random_graph(50, 0.1, rng);
    std::vector<int> all(50);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> pick(all.begin(), all.begin() + 10);
    std::sort(pick.begin(), pick.end());
    CHECK(cut_ratio(from_dense(d), to_ids(pick)) == doctest::Approx(oracle::cut_ratio(d, pick)).epsilon(1e-12));
  }
}

TEST_CASE("core numbers: examples and peeling oracle") {
  const auto k4 = make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(core_numbers(k4) == std::vector<std::uint32_t>{3, 3, 3, 3});
  const auto tree = make(5, {{0, 1}, {0, 2}, {2, 3}, {2, 4}});
  CHECK(core_numbers(tree) == std::vector<std::uint32_t>{1, 1, 1, 1, 1});
  const auto pendant = make(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
  CHECK(core_numbers(pendant) == std::vector<std::uint32_t>{3, 3, 3, 3, 1});
  CHECK(core_numbers(make(2, {})) == std::vector<std::uint32_t>{0, 0});

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const double p = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0;
    const auto d = oracle::random_graph(n, p, rng);
    const auto expect = oracle::core_numbers(d);
    const auto got = core_numbers(from_dense(d));
    for (int v = 0; v < n; ++v) CHECK(got[v] == static_cast<std::uint32_t>(expect[v]));
  }
}

TEST_CASE("connected components: examples and union-find oracle") {
  CHECK(connected_components(cycle(6)).count == 1);
  const auto two_triangles = make(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const auto c = connected_components(two_triangles);
  CHECK(c.count == 2);
  CHECK(c.component_of[0] == c.component_of[2]);
  CHECK(c.component_of[0] != c.component_of[3]);

  // A forest of t random trees has t components.
  std::mt19937_64 rng(37);
  for (int t = 1; t <= 6; ++t) {
    std::vector<std::pair<NodeId, NodeId>> e;
    NodeId base = 0;
    for (int tree = 0; tree < t; ++tree) {
      const NodeId size = 1 + static_cast<NodeId>(rng() % 6);
      for (NodeId v = 1; v < size; ++v) e.emplace_back(base + v, base + static_cast<NodeId>(rng() % v));
      base += size;
    }
    CHECK(connected_components(make(base, e)).count == static_cast<std::size_t>(t));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const auto d = oracle::random_graph(n, 0.15, rng);
    CHECK(connected_components(from_dense(d)).count == static_cast<std::size_t>(oracle::components(d)));
  }
}

TEST_CASE("subgraph set validation") {
  const auto g = make(4, {{0, 1}, {1, 2}});
  SubgraphSet set;
  set.num_classes = 2;
  set.subgraphs.push_back(Subgraph{{0, 1}, {{0, 1}}});
  set.labels.push_back({1});
  set.split.push_back(Split::kTrain);
  CHECK_NOTHROW(set.validate(g));
  CHECK(set.indices(Split::kTrain) == std::vector<std::size_t>{0});
  CHECK(set.indices(Split::kTest).empty());

  auto bad_edge = set;
  bad_edge.subgraphs[0].edges = {{0, 2}};
  CHECK_THROWS_AS(bad_edge.validate(g), ContractError);
  auto bad_label = set;
  bad_label.labels[0] = {2};
  CHECK_THROWS_AS(bad_label.validate(g), ContractError);
  auto no_label = set;
  no_label.labels[0].clear();
  CHECK_THROWS_AS(no_label.validate(g), ContractError);
}
