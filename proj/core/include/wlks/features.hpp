#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "wlks/graph.hpp"
#include "wlks/kernel.hpp"

namespace wlks {

/// Dense row-major real matrix: one row per node (or per subgraph once aggregated).
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {values.data() + i * cols, cols}; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Features file: one row per node, space-separated decimals, equal widths.
FeatureMatrix parse_features(std::istream& in);
void write_features(const FeatureMatrix& x, std::ostream& out);

/// Per-subgraph sum of node rows over each subgraph's node set.
FeatureMatrix aggregate_sum(const FeatureMatrix& node_features, std::span<const Subgraph> subs);

/// Per-dimension z-scoring fitted on a subset of rows. Dimensions with zero
/// standard deviation on that subset are dropped.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& x, std::span<const std::size_t> fit_rows);

  FeatureMatrix transform(const FeatureMatrix& x) const;
  std::size_t effective_width() const noexcept { return kept_.size(); }

 private:
  std::vector<std::size_t> kept_;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

struct FeatureKernelSpec {
  FeatureKernelKind kind = FeatureKernelKind::kLinear;
  /// RBF width; defaults to 1 / effective feature width.
  std::optional<double> gamma;
};

/// Kernel between two already-standardized feature sets. Symmetric when
/// `b` is null (a against itself).
KernelMatrix feature_gram(const FeatureMatrix& a, const FeatureMatrix* b, const FeatureKernelSpec& spec);

/// Continuous WL propagation: a^{i+1}(v) = (a^i(v) + mean of a^i over N(v)) / 2,
/// isolated nodes keep their value. Returns iterations 0..T concatenated per node.
FeatureMatrix continuous_wl_embed(const GlobalGraph& g, const FeatureMatrix& x, std::size_t iterations,
                                  unsigned threads = 1);

/// Random-walk return probabilities [P^t]_vv for t = 1..L with P = D^-1 A
/// (isolated rows are zero), for the requested nodes. Row r belongs to nodes[r].
FeatureMatrix rwse_encoding(const GlobalGraph& g, std::span<const NodeId> nodes, std::size_t walk_length,
                            unsigned threads = 1);

/// Inner-product kernel of sum-aggregated RWSE vectors. `cols` null gives the
/// square gram of `rows`.
KernelMatrix rwse_kernel(const GlobalGraph& g, std::span<const Subgraph> rows, std::span<const Subgraph> cols,
                         std::size_t walk_length, unsigned threads = 1);
KernelMatrix rwse_kernel(const GlobalGraph& g, std::span<const Subgraph> subs, std::size_t walk_length,
                         unsigned threads = 1);

/// Sum-aggregated RWSE vector per subgraph (rows aligned with subs).
FeatureMatrix rwse_subgraph_features(const GlobalGraph& g, std::span<const Subgraph> subs, std::size_t walk_length,
                                     unsigned threads = 1);

}  // namespace wlks
