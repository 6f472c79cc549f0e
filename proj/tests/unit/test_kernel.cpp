#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wlks/error.hpp"
#include "wlks/kernel.hpp"

using namespace wlks;

namespace {

HistogramStack stack_of(std::uint64_t ns, std::vector<std::vector<std::pair<ColorId, std::uint32_t>>> levels) {
  HistogramStack s;
  for (std::size_t t = 0; t < levels.size(); ++t) {
    ColorHistogram h;
    h.namespace_id = ns;
    h.iteration = t;
    h.bins = std::move(levels[t]);
    s.push_back(std::move(h));
  }
  return s;
}

Graph from_dense(const oracle::DenseGraph& d) { return Graph::from_edges(d.n, oracle::edge_pairs(d)); }

oracle::Dense dense(const KernelMatrix& k) {
  oracle::Dense d(k.rows(), std::vector<double>(k.cols()));
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j) d[i][j] = k(i, j);
  }
  return d;
}

struct RandomInstance {
  Graph g;
  std::vector<Subgraph> subs;
};

RandomInstance random_instance(std::mt19937_64& rng, int n, int m, double p) {
  RandomInstance r{from_dense(oracle::random_graph(n, p, rng)), {}};
  for (int s = 0; s < m; ++s) {
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
      if (rng() % 6 == 0) nodes.push_back(v);
    }
    if (nodes.empty()) nodes.push_back(static_cast<NodeId>(rng() % n));
    r.subs.push_back(Subgraph::induced(r.g, nodes));
  }
  return r;
}

}  // namespace

TEST_CASE("gram: identical histograms and disjoint supports") {
  const auto a = stack_of(7, {{{0, 3}}, {{1, 2}, {2, 1}}});
  const auto b = stack_of(7, {{{0, 3}}, {{3, 3}}});
  const std::vector<HistogramStack> stacks{a, a, b};
  const auto k = gram_from_histograms(stacks, GramOptions{1, false, false, 1});
  CHECK(k(0, 1) == 5.0);
  CHECK(k(0, 2) == 0.0);
  CHECK(k.symmetric());
  CHECK(k.is_exactly_symmetric());
  const auto kc = gram_from_histograms(stacks, GramOptions{1, true, false, 1});
  CHECK(kc(0, 2) == 9.0);
  CHECK(kc(0, 1) == 14.0);
}

TEST_CASE("gram: normalized diagonal is T+1 when combining and 1 otherwise") {
  std::mt19937_64 rng(73);
  auto inst = random_instance(rng, 40, 10, 0.1);
  ColorTable table;
  WlsOptions opts;
  opts.iterations = 3;
  const auto stacks = wls_batch(inst.g, inst.subs, Hop(1), opts, table);
  const auto kc = gram_from_histograms(stacks, GramOptions{3, true, true, 1});
  const auto kf = gram_from_histograms(stacks, GramOptions{3, false, true, 1});
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    CHECK(kc(i, i) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(kf(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gram: prefix of a longer stack equals a shorter run") {
  std::mt19937_64 rng(79);
  auto inst = random_instance(rng, 40, 8, 0.1);
  for (const Hop hop : {Hop(0), Hop(2), Hop::global()}) {
    ColorTable long_table;
    WlsOptions opts;
    opts.iterations = 5;
    const auto full = wls_batch(inst.g, inst.subs, hop, opts, long_table);
    for (std::size_t t = 1; t <= 5; ++t) {
      ColorTable short_table;
      opts.iterations = t;
      const auto part = wls_batch(inst.g, inst.subs, hop, opts, short_table);
      for (bool combine : {false, true}) {
        for (bool normalize : {false, true}) {
          const GramOptions go{t, combine, normalize, 1};
          CHECK(gram_from_histograms(full, go) == gram_from_histograms(part, go));
        }
      }
    }
  }
}

TEST_CASE("gram: contract violations") {
  const auto a = stack_of(1, {{{0, 1}}, {{1, 1}}});
  const auto b = stack_of(2, {{{0, 1}}, {{1, 1}}});
  const std::vector<HistogramStack> mixed{a, b};
  CHECK_THROWS_AS(gram_from_histograms(mixed, GramOptions{1, false, false, 1}), ContractError);
  const std::vector<HistogramStack> one{a};
  CHECK_THROWS_AS(gram_from_histograms(one, GramOptions{2, false, false, 1}), ContractError);
  const std::vector<HistogramStack> other{b};
  CHECK_THROWS_AS(cross_gram(one, other, GramOptions{1, false, false, 1}), ContractError);
}

TEST_CASE("gram: threads do not change values") {
  std::mt19937_64 rng(83);
  auto inst = random_instance(rng, 80, 30, 0.05);
  ColorTable table;
  WlsOptions opts;
  opts.iterations = 3;
  const auto stacks = wls_batch(inst.g, inst.subs, Hop(1), opts, table);
  for (bool normalize : {false, true}) {
    const auto a = gram_from_histograms(stacks, GramOptions{3, true, normalize, 1});
    const auto b = gram_from_histograms(stacks, GramOptions{3, true, normalize, 6});
    CHECK(a == b);
  }
}

TEST_CASE("cross gram agrees with the joint square gram") {
  std::mt19937_64 rng(89);
  auto inst = random_instance(rng, 50, 12, 0.08);
  ColorTable table;
  WlsOptions opts;
  opts.iterations = 2;
  const auto stacks = wls_batch(inst.g, inst.subs, Hop(1), opts, table);
  const std::vector<HistogramStack> train(stacks.begin(), stacks.begin() + 8);
  std::vector<HistogramStack> test(stacks.begin() + 8, stacks.end());
  test.push_back(train[3]);  // a duplicated train subgraph
  for (bool normalize : {false, true}) {
    const GramOptions go{2, true, normalize, 1};
    const auto joint = gram_from_histograms(stacks, go);
    const auto sq = gram_from_histograms(train, go);
    const auto self = cross_gram(train, train, go);
    CHECK(std::ranges::equal(self.values(), sq.values()));
    const auto x = cross_gram(test, train, go);
    REQUIRE(x.rows() == 5);
    REQUIRE(x.cols() == 8);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 8; ++j) CHECK(x(i, j) == joint(8 + i, j));
    }
    for (std::size_t j = 0; j < 8; ++j) CHECK(x(4, j) == sq(3, j));
  }
}

TEST_CASE("kernels ignore global node relabeling") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30;
    const auto d = oracle::random_graph(n, 0.1, rng);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<NodeId, NodeId>> pe;
    for (auto [u, v] : oracle::edge_pairs(d)) pe.emplace_back(perm[u], perm[v]);
    const auto g = from_dense(d);
    const auto gp = Graph::from_edges(n, pe);
    std::vector<Subgraph> a, b;
    for (int s = 0; s < 6; ++s) {
      std::vector<NodeId> nodes, mapped;
      for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
        if (rng() % 5 == 0) {
          nodes.push_back(v);
          mapped.push_back(perm[v]);
        }
      }
      if (nodes.empty()) {
        nodes.push_back(0);
        mapped.push_back(perm[0]);
      }
      a.push_back(Subgraph::induced(g, nodes));
      b.push_back(Subgraph::induced(gp, mapped));
    }
    for (const Hop hop : {Hop(0), Hop(1), Hop(2), Hop::global()}) {
      ColorTable ta, tb;
      WlsOptions opts;
      opts.iterations = 3;
      const GramOptions go{3, true, false, 1};
      CHECK(gram_from_histograms(wls_batch(g, a, hop, opts, ta), go) ==
            gram_from_histograms(wls_batch(gp, b, hop, opts, tb), go));
    }
  }
}

TEST_CASE("combine: identities, bilinearity and errors") {
  KernelMatrix a(2, 2, true);
  a(0, 0) = 2;
  a(0, 1) = a(1, 0) = 0.5;
  a(1, 1) = 3;
  KernelMatrix b = KernelMatrix::identity(2);
  const WeightedKernel one[] = {{&a, 1.0}};
  CHECK(combine(one) == a);
  const WeightedKernel halves[] = {{&a, 0.5}, {&a, 0.5}};
  CHECK(combine(halves) == a);
  const WeightedKernel mixed[] = {{&a, 0.3}, {&b, 1.7}};
  const auto c = combine(mixed);
  CHECK(c.symmetric());
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(c(i, j) == 0.3 * a(i, j) + 1.7 * b(i, j));
  }
  KernelMatrix wide(2, 3);
  const WeightedKernel bad_shape[] = {{&a, 1.0}, {&wide, 1.0}};
  CHECK_THROWS_AS(combine(bad_shape), ContractError);
  const WeightedKernel bad_weight[] = {{&a, 0.0}};
  CHECK_THROWS_AS(combine(bad_weight), ContractError);
  KernelMatrix rect(1, 2);
  const WeightedKernel rects[] = {{&rect, 1.0}};
  CHECK_FALSE(combine(rects).symmetric());
}

TEST_CASE("psd check: small exact cases") {
  const auto id = psd_check(KernelMatrix::identity(4));
  CHECK(id.min_eigenvalue == doctest::Approx(1.0));
  CHECK(id.pass);
  KernelMatrix ones(3, 3, true);
  for (auto& v : ones.values()) v = 1.0;
  const auto o = psd_check(ones);
  CHECK(o.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(o.pass);
  KernelMatrix neg(2, 2, true);
  neg(0, 0) = 1;
  neg(1, 1) = 1;
  neg(0, 1) = neg(1, 0) = 2;  // eigenvalues 3 and -1
  const auto n = psd_check(neg);
  CHECK(n.min_eigenvalue == doctest::Approx(-1.0));
  CHECK_FALSE(n.pass);
  KernelMatrix skew(2, 2);
  skew(0, 1) = 1;
  CHECK_THROWS_AS(psd_check(skew), ContractError);
}

TEST_CASE("psd check: WL grams and their mixtures agree with Jacobi and pass") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 60, 50, 0.06);
    ColorTable table;
    GlobalColoringCache cache(inst.g, table);
    WlsOptions opts;
    opts.iterations = 3;
    const auto h0 = wls_batch(inst.g, inst.subs, Hop(0), opts, table, &cache);
    const auto hg = wls_batch(inst.g, inst.subs, Hop::global(), opts, table, &cache);
    const GramOptions go{3, trial % 2 == 0, trial % 3 == 0, 1};
    const auto k0 = gram_from_histograms(h0, go);
    const auto kg = gram_from_histograms(hg, go);
    const WeightedKernel parts[] = {{&k0, 0.9}, {&kg, 0.1}};
    const auto mixed = combine(parts);
    for (const auto* k : {&k0, &kg, &mixed}) {
      const auto r = psd_check(*k, 1e-8);
      CHECK(r.pass);
      CHECK(r.min_eigenvalue == doctest::Approx(oracle::min_eigenvalue(dense(*k))).epsilon(1e-6).scale(k->trace()));
    }
  }
}

TEST_CASE("mix: weights, interpolation and validation") {
  std::mt19937_64 rng(103);
  auto inst = random_instance(rng, 40, 10, 0.1);
  ColorTable table;
  WlsOptions opts;
  opts.iterations = 2;
  const GramOptions go{2, false, false, 1};
  const auto k0 = gram_from_histograms(wls_batch(inst.g, inst.subs, Hop(0), opts, table), go);
  const auto kg = gram_from_histograms(wls_batch(inst.g, inst.subs, Hop::global(), opts, table), go);
  const KernelMatrix* ks[] = {&k0, &kg};

  MixSpec near_zero{{{Hop(0), 1 - 1e-12}, {Hop::global(), 1e-12}}, std::nullopt};
  const auto m1 = mix(near_zero, ks);
  for (std::size_t i = 0; i < m1.values().size(); ++i) {
    CHECK(m1.values()[i] == doctest::Approx(k0.values()[i]).epsilon(1e-9));
  }
  MixSpec near_global{{{Hop(0), 1e-12}, {Hop::global(), 1 - 1e-12}}, std::nullopt};
  const auto m2 = mix(near_global, ks);
  for (std::size_t i = 0; i < m2.values().size(); ++i) {
    CHECK(m2.values()[i] == doctest::Approx(kg.values()[i]).epsilon(1e-9));
  }

  // Feature term: alpha_structure = 1 / (1 + alpha_feature).
  const auto feat = KernelMatrix::identity(k0.rows());
  MixSpec with_feature{{{Hop(0), 1.0}}, 0.25};
  CHECK(with_feature.structure_alpha() == doctest::Approx(0.8));
  const KernelMatrix* only0[] = {&k0};
  const auto m3 = mix(with_feature, only0, &feat);
  CHECK(m3(0, 0) == doctest::Approx(0.8 * k0(0, 0) + 0.25));
  CHECK(m3(0, 1) == doctest::Approx(0.8 * k0(0, 1)));
  CHECK_THROWS_AS(mix(with_feature, only0, nullptr), ContractError);

  MixSpec dup{{{Hop(0), 0.5}, {Hop(0), 0.5}}, std::nullopt};
  CHECK_THROWS_AS(dup.validate(), ConfigError);
  MixSpec zero{{{Hop(0), 0.0}}, std::nullopt};
  CHECK_THROWS_AS(zero.validate(), ConfigError);
  MixSpec bad_feature{{{Hop(0), 1.0}}, -0.1};
  CHECK_THROWS_AS(bad_feature.validate(), ConfigError);
  CHECK_THROWS_AS(mix(near_zero, only0), ContractError);
}

TEST_CASE("kernel matrix: text and binary dumps") {
  KernelMatrix k(2, 3);
  k(0, 0) = 1.5;
  k(0, 2) = -0.1;
  k(1, 1) = 1e-300;
  k(1, 2) = 123456789.125;
  std::stringstream text;
  write_text(k, text);
  CHECK(text.str().rfind("2 3\n", 0) == 0);
  CHECK(read_text(text) == k);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_binary(k, bin);
  const auto raw = bin.str();
  REQUIRE(raw.size() == 16 + 6 * 8);
  CHECK(static_cast<unsigned char>(raw[0]) == 2);
  CHECK(static_cast<unsigned char>(raw[8]) == 3);
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(raw[16 + b]);
  CHECK(std::bit_cast<double>(bits) == 1.5);
  CHECK(read_binary(bin) == k);

  std::istringstream truncated("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_text(truncated), ParseError);
  CHECK_THROWS_AS(KernelMatrix(2, 3, true), ContractError);
}

TEST_CASE("kernel matrix: select and helpers") {
  KernelMatrix k(3, 3, true);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) k(i, j) = static_cast<double>(i + j);
  }
  CHECK(k.trace() == 6.0);
  CHECK(k.all_finite());
  const std::vector<std::size_t> r{2, 0};
  const std::vector<std::size_t> c{1};
  const auto s = k.select(r, c);
  CHECK(s.rows() == 2);
  CHECK(s(0, 0) == 3.0);
  CHECK(s(1, 0) == 1.0);
  const std::vector<std::size_t> bad{5};
  CHECK_THROWS_AS(k.select(bad, c), ContractError);
}
