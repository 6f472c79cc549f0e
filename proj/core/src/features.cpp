#include "wlks/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "wlks/error.hpp"
#include "wlks/parallel.hpp"

namespace wlks {

FeatureMatrix parse_features(std::istream& in) {
  FeatureMatrix x;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    row.clear();
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      double v = 0;
      auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
      if (ec != std::errc() || ptr != line.data() + j || !std::isfinite(v)) {
        throw ParseError("features: bad value '" + line.substr(i, j - i) + "'", line_no);
      }
      row.push_back(v);
      i = j;
    }
    if (row.empty()) throw ParseError("features: empty row", line_no);
    if (x.rows == 0) {
      x.cols = row.size();
    } else if (row.size() != x.cols) {
      throw ParseError("features: expected " + std::to_string(x.cols) + " values", line_no);
    }
    x.values.insert(x.values.end(), row.begin(), row.end());
    ++x.rows;
  }
  return x;
}

void write_features(const FeatureMatrix& x, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x(i, j));
      if (j) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

FeatureMatrix aggregate_sum(const FeatureMatrix& node_features, std::span<const Subgraph> subs) {
  FeatureMatrix out(subs.size(), node_features.cols);
  for (std::size_t s = 0; s < subs.size(); ++s) {
    for (NodeId v : subs[s].nodes) {
      if (v >= node_features.rows) throw ContractError("aggregate_sum: node without a feature row");
      for (std::size_t j = 0; j < out.cols; ++j) out(s, j) += node_features(v, j);
    }
  }
  return out;
}

Standardizer Standardizer::fit(const FeatureMatrix& x, std::span<const std::size_t> fit_rows) {
  if (fit_rows.empty()) throw ContractError("standardizer: no rows to fit on");
  Standardizer st;
  const double n = static_cast<double>(fit_rows.size());
  for (std::size_t j = 0; j < x.cols; ++j) {
    double mean = 0;
    for (auto r : fit_rows) mean += x(r, j);
    mean /= n;
    double var = 0;
    for (auto r : fit_rows) var += (x(r, j) - mean) * (x(r, j) - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) continue;
    st.kept_.push_back(j);
    st.mean_.push_back(mean);
    st.scale_.push_back(1.0 / sd);
  }
  return st;
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& x) const {
  FeatureMatrix out(x.rows, kept_.size());
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t k = 0; k < kept_.size(); ++k) out(i, k) = (x(i, kept_[k]) - mean_[k]) * scale_[k];
  }
  return out;
}

KernelMatrix feature_gram(const FeatureMatrix& a, const FeatureMatrix* b, const FeatureKernelSpec& spec) {
  const FeatureMatrix& other = b ? *b : a;
  if (other.cols != a.cols) throw ContractError("feature_gram: feature widths differ");
  const double gamma = spec.gamma.value_or(a.cols ? 1.0 / static_cast<double>(a.cols) : 1.0);
  KernelMatrix k(a.rows, other.rows, b == nullptr);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const std::size_t j0 = b ? 0 : i;
    for (std::size_t j = j0; j < other.rows; ++j) {
      double v = 0;
      if (spec.kind == FeatureKernelKind::kLinear) {
        for (std::size_t f = 0; f < a.cols; ++f) v += a(i, f) * other(j, f);
      } else {
        double sq = 0;
        for (std::size_t f = 0; f < a.cols; ++f) {
          const double d = a(i, f) - other(j, f);
          sq += d * d;
        }
        v = std::exp(-gamma * sq);
      }
      k(i, j) = v;
      if (!b) k(j, i) = v;
    }
  }
  return k;
}

FeatureMatrix continuous_wl_embed(const GlobalGraph& g, const FeatureMatrix& x, std::size_t iterations,
                                  unsigned threads) {
  if (x.rows != g.num_nodes()) throw ContractError("continuous_wl_embed: one feature row per node required");
  const std::size_t f = x.cols;
  FeatureMatrix out(x.rows, f * (iterations + 1));
  std::vector<double> cur = x.values;
  std::vector<double> next(cur.size());
  for (std::size_t it = 0;; ++it) {
    for (std::size_t v = 0; v < x.rows; ++v) {
      std::copy_n(cur.begin() + static_cast<std::ptrdiff_t>(v * f), f,
                  out.values.begin() + static_cast<std::ptrdiff_t>(v * out.cols + it * f));
    }
    if (it == iterations) break;
    parallel_for(x.rows, threads, [&](std::size_t v) {
      const auto nbrs = g.neighbors(static_cast<NodeId>(v));
      double* dst = next.data() + v * f;
      const double* self = cur.data() + v * f;
      if (nbrs.empty()) {
        std::copy_n(self, f, dst);
        return;
      }
      std::fill_n(dst, f, 0.0);
      for (NodeId u : nbrs) {
        const double* src = cur.data() + static_cast<std::size_t>(u) * f;
        for (std::size_t j = 0; j < f; ++j) dst[j] += src[j];
      }
      const double inv = 1.0 / static_cast<double>(nbrs.size());
      for (std::size_t j = 0; j < f; ++j) dst[j] = 0.5 * (self[j] + dst[j] * inv);
    });
    cur.swap(next);
  }
  return out;
}

FeatureMatrix rwse_encoding(const GlobalGraph& g, std::span<const NodeId> nodes, std::size_t walk_length,
                            unsigned threads) {
  if (walk_length == 0) throw ConfigError("rwse: walk length must be >= 1");
  FeatureMatrix out(nodes.size(), walk_length);
  // Return probabilities need walks of length up to L. With reversibility,
  // d_u [P^b]_uv = d_v [P^b]_vu, so [P^{a+b}]_vv = sum_u p_a[u] p_b[u] d_v / d_u
  // where p_s = e_v P^s; propagating ceil(L/2) steps is enough.
  const std::size_t half = (walk_length + 1) / 2;
  parallel_for(nodes.size(), threads, [&](std::size_t r) {
    const NodeId v = nodes[r];
    if (g.degree(v) == 0) return;
    const double dv = static_cast<double>(g.degree(v));
    std::vector<std::vector<double>> p(half + 1);
    std::vector<NodeId> support{v};
    std::vector<std::uint8_t> in_support(g.num_nodes(), 0);
    in_support[v] = 1;
    p[0].assign(g.num_nodes(), 0.0);
    p[0][v] = 1.0;
    for (std::size_t s = 1; s <= half; ++s) {
      p[s].assign(g.num_nodes(), 0.0);
      const std::size_t frontier_end = support.size();
      for (std::size_t idx = 0; idx < frontier_end; ++idx) {
        const NodeId w = support[idx];
        const double mass = p[s - 1][w];
        if (mass == 0) continue;
        const double share = mass / static_cast<double>(g.degree(w));
        for (NodeId u : g.neighbors(w)) {
          p[s][u] += share;
          if (!in_support[u]) {
            in_support[u] = 1;
            support.push_back(u);
          }
        }
      }
    }
    auto ret = [&](std::size_t a, std::size_t b) {
      double sum = 0;
      for (NodeId u : support) {
        if (p[a][u] != 0 && p[b][u] != 0) sum += p[a][u] * p[b][u] * dv / static_cast<double>(g.degree(u));
      }
      return sum;
    };
    for (std::size_t t = 1; t <= walk_length; ++t) out(r, t - 1) = ret(t / 2, t - t / 2);
  });
  return out;
}

FeatureMatrix rwse_subgraph_features(const GlobalGraph& g, std::span<const Subgraph> subs, std::size_t walk_length,
                                     unsigned threads) {
  std::vector<NodeId> nodes;
  for (const auto& s : subs) nodes.insert(nodes.end(), s.nodes.begin(), s.nodes.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const FeatureMatrix enc = rwse_encoding(g, nodes, walk_length, threads);
  FeatureMatrix out(subs.size(), walk_length);
  for (std::size_t s = 0; s < subs.size(); ++s) {
    for (NodeId v : subs[s].nodes) {
      const auto r = static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
      for (std::size_t t = 0; t < walk_length; ++t) out(s, t) += enc(r, t);
    }
  }
  return out;
}

KernelMatrix rwse_kernel(const GlobalGraph& g, std::span<const Subgraph> rows, std::span<const Subgraph> cols,
                         std::size_t walk_length, unsigned threads) {
  const FeatureMatrix a = rwse_subgraph_features(g, rows, walk_length, threads);
  const FeatureMatrix b = rwse_subgraph_features(g, cols, walk_length, threads);
  return feature_gram(a, &b, {FeatureKernelKind::kLinear, std::nullopt});
}

KernelMatrix rwse_kernel(const GlobalGraph& g, std::span<const Subgraph> subs, std::size_t walk_length,
                         unsigned threads) {
  const FeatureMatrix a = rwse_subgraph_features(g, subs, walk_length, threads);
  return feature_gram(a, nullptr, {FeatureKernelKind::kLinear, std::nullopt});
}

}  // namespace wlks
