#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wlks/error.hpp"
#include "wlks/features.hpp"

using namespace wlks;

namespace {

Graph from_dense(const oracle::DenseGraph& d) { return Graph::from_edges(d.n, oracle::edge_pairs(d)); }

FeatureMatrix column(std::initializer_list<double> v) {
  FeatureMatrix x(v.size(), 1);
  std::size_t i = 0;
  for (double d : v) x(i++, 0) = d;
  return x;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

}  // namespace

TEST_CASE("features file: parse, write and errors") {
  std::istringstream in("1 2.5\n-3 0\n");
  const auto x = parse_features(in);
  CHECK(x.rows == 2);
  CHECK(x.cols == 2);
  CHECK(x(0, 1) == 2.5);
  CHECK(x(1, 0) == -3.0);
  std::stringstream out;
  write_features(x, out);
  CHECK(parse_features(out) == x);

  std::istringstream ragged("1 2\n3\n");
  CHECK_THROWS_AS(parse_features(ragged), ParseError);
  std::istringstream junk("1 abc\n");
  CHECK_THROWS_AS(parse_features(junk), ParseError);
}

TEST_CASE("aggregate sums node rows per subgraph") {
  FeatureMatrix x(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 1.0;
  }
  const std::vector<Subgraph> subs{{{0, 3}, {}}, {{1, 2, 3}, {}}};
  const auto a = aggregate_sum(x, subs);
  CHECK(a.rows == 2);
  CHECK(a(0, 0) == 3.0);
  CHECK(a(0, 1) == 2.0);
  CHECK(a(1, 0) == 6.0);
  CHECK(a(1, 1) == 3.0);
  const std::vector<Subgraph> out_of_range{{{7}, {}}};
  CHECK_THROWS_AS(aggregate_sum(x, out_of_range), ContractError);
}

TEST_CASE("standardized opposite points give a +-1 linear gram") {
  const auto x = column({-1.0, 1.0});
  const auto rows = all_rows(2);
  const auto s = Standardizer::fit(x, rows);
  const auto z = s.transform(x);
  const auto k = feature_gram(z, nullptr, {});
  CHECK(k(0, 0) == doctest::Approx(1.0));
  CHECK(k(0, 1) == doctest::Approx(-1.0));
  CHECK(k(1, 0) == doctest::Approx(-1.0));
  CHECK(k(1, 1) == doctest::Approx(1.0));
  CHECK(k.symmetric());
}

TEST_CASE("standardizer drops constant dimensions and uses only fit rows") {
  FeatureMatrix x(4, 3);
  const double data[4][3] = {{1, 5, 0}, {3, 5, 2}, {5, 5, 4}, {100, 9, -7}};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = data[i][j];
  }
  const std::vector<std::size_t> fit_rows{0, 1, 2};
  const auto s = Standardizer::fit(x, fit_rows);
  CHECK(s.effective_width() == 2);
  const auto z = s.transform(x);
  REQUIRE(z.cols == 2);
  // Column 0 on the fit rows: mean 3, population std sqrt(8/3).
  const double sd = std::sqrt(8.0 / 3.0);
  CHECK(z(0, 0) == doctest::Approx(-2.0 / sd));
  CHECK(z(1, 0) == doctest::Approx(0.0));
  CHECK(z(3, 0) == doctest::Approx(97.0 / sd));
  CHECK(z(3, 1) == doctest::Approx((-7.0 - 2.0) / sd));
  const std::vector<std::size_t> none;
  CHECK_THROWS_AS(Standardizer::fit(x, none), ContractError);
}

TEST_CASE("rbf kernel: unit diagonal, flat limit and cross shape") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  FeatureMatrix a(6, 3), b(2, 3);
  for (auto& v : a.values) v = nd(rng);
  for (auto& v : b.values) v = nd(rng);
  const auto k = feature_gram(a, nullptr, {FeatureKernelKind::kRbf, 0.7});
  for (std::size_t i = 0; i < 6; ++i) CHECK(k(i, i) == 1.0);
  CHECK(k(0, 1) == doctest::Approx(std::exp(-0.7 * [&] {
          double s = 0;
          for (std::size_t j = 0; j < 3; ++j) s += (a(0, j) - a(1, j)) * (a(0, j) - a(1, j));
          return s;
        }())));
  const auto flat = feature_gram(a, nullptr, {FeatureKernelKind::kRbf, 1e-14});
  for (double v : flat.values()) CHECK(v == doctest::Approx(1.0));
  const auto cross = feature_gram(b, &a, {FeatureKernelKind::kRbf, 0.7});
  CHECK(cross.rows() == 2);
  CHECK(cross.cols() == 6);
  FeatureMatrix narrow(1, 2);
  CHECK_THROWS_AS(feature_gram(narrow, &a, {}), ContractError);
}

TEST_CASE("continuous WL: fixed points and a path") {
  SUBCASE("edgeless graph keeps its values") {
    const auto g = Graph::from_edges(3, {});
    const auto x = column({1.0, -2.0, 4.0});
    const auto e = continuous_wl_embed(g, x, 3);
    REQUIRE(e.cols == 4);
    for (std::size_t v = 0; v < 3; ++v) {
      for (std::size_t t = 0; t <= 3; ++t) CHECK(e(v, t) == x(v, 0));
    }
  }
  SUBCASE("uniform values stay uniform") {
    std::mt19937_64 rng(11);
    const auto g = from_dense(oracle::random_graph(20, 0.2, rng));
    FeatureMatrix x(20, 1);
    for (auto& v : x.values) v = 2.5;
    const auto e = continuous_wl_embed(g, x, 4);
    for (double v : e.values) CHECK(v == doctest::Approx(2.5));
  }
  SUBCASE("path 0-1-2 with a spike in the middle") {
    const std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 2}};
    const auto g = Graph::from_edges(3, edges);
    const auto x = column({0.0, 1.0, 0.0});
    const auto e = continuous_wl_embed(g, x, 1);
    CHECK(e(0, 1) == doctest::Approx(0.5));
    CHECK(e(1, 1) == doctest::Approx(0.5));
    CHECK(e(2, 1) == doctest::Approx(0.5));
  }
  const auto g = Graph::from_edges(2, {});
  CHECK_THROWS_AS(continuous_wl_embed(g, column({1.0}), 1), ContractError);
}

TEST_CASE("rwse: closed-form cases") {
  SUBCASE("isolated node never returns") {
    const auto g = Graph::from_edges(2, {});
    const std::vector<NodeId> nodes{0};
    const auto r = rwse_encoding(g, nodes, 4);
    for (double v : r.values) CHECK(v == 0.0);
  }
  SUBCASE("single edge alternates") {
    const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}};
    const auto g = Graph::from_edges(2, e);
    const std::vector<NodeId> nodes{0, 1};
    const auto r = rwse_encoding(g, nodes, 6);
    for (std::size_t v = 0; v < 2; ++v) {
      for (std::size_t t = 1; t <= 6; ++t) CHECK(r(v, t - 1) == doctest::Approx(t % 2 == 0 ? 1.0 : 0.0));
    }
  }
  SUBCASE("triangle returns with probability one half after two steps") {
    const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 2}, {0, 2}};
    const auto g = Graph::from_edges(3, e);
    const std::vector<NodeId> nodes{2};
    const auto r = rwse_encoding(g, nodes, 3);
    CHECK(r(0, 0) == doctest::Approx(0.0));
    CHECK(r(0, 1) == doctest::Approx(0.5));
    CHECK(r(0, 2) == doctest::Approx(0.25));
  }
  const auto g = Graph::from_edges(1, {});
  const std::vector<NodeId> nodes{0};
  CHECK_THROWS_AS(rwse_encoding(g, nodes, 0), ConfigError);
}

TEST_CASE("rwse agrees with dense matrix powers and aggregates by sum") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = oracle::random_graph(25, 0.15, rng);
    const auto g = from_dense(d);
    const int L = 8;
    const auto want = oracle::rwse(d, L);
    std::vector<NodeId> nodes(25);
    std::iota(nodes.begin(), nodes.end(), NodeId{0});
    const auto got = rwse_encoding(g, nodes, L, 3);
    for (int v = 0; v < 25; ++v) {
      for (int t = 0; t < L; ++t) CHECK(got(v, t) == doctest::Approx(want[v][t]).epsilon(1e-12));
    }
    const std::vector<Subgraph> subs{{{1, 4, 9}, {}}, {{0, 24}, {}}};
    const auto agg = rwse_subgraph_features(g, subs, L);
    for (int t = 0; t < L; ++t) {
      CHECK(agg(0, t) == doctest::Approx(want[1][t] + want[4][t] + want[9][t]));
      CHECK(agg(1, t) == doctest::Approx(want[0][t] + want[24][t]));
    }
    const auto k = rwse_kernel(g, subs, L);
    double dot = 0;
    for (int t = 0; t < L; ++t) dot += agg(0, t) * agg(1, t);
    CHECK(k(0, 1) == doctest::Approx(dot));
  }
}
