#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wlks/kernel_matrix.hpp"
#include "wlks/wl.hpp"

namespace wlks {

struct GramOptions {
  /// Highest WL iteration T used; stacks must hold at least T + 1 levels.
  std::size_t iterations = 3;
  /// Sum inner products over iterations 0..T instead of using T alone.
  bool combine_all_iterations = false;
  /// L2-normalize every per-iteration histogram before the inner product.
  bool normalize = false;
  unsigned threads = 1;
};

/// Symmetric M x M gram of WL histogram stacks. Unnormalized values are exact
/// integers. Throws ContractError on mixed namespaces or short stacks.
KernelMatrix gram_from_histograms(std::span<const HistogramStack> stacks, const GramOptions& opts);

/// Rectangular gram: rows x cols with the same inner product as the square gram.
/// Colors present on only one side contribute zero.
KernelMatrix cross_gram(std::span<const HistogramStack> rows, std::span<const HistogramStack> cols,
                        const GramOptions& opts);

struct WeightedKernel {
  const KernelMatrix* matrix;
  double weight;
};

/// Elementwise sum of weight * matrix. Weights must be positive and shapes equal.
KernelMatrix combine(std::span<const WeightedKernel> parts);

struct PsdResult {
  double min_eigenvalue = 0;
  bool pass = false;
};

/// Smallest eigenvalue of a symmetric matrix; passes when it is at least
/// -tol * max(1, trace). Throws ContractError for non-symmetric input.
PsdResult psd_check(const KernelMatrix& k, double tol = 1e-8);

enum class FeatureKernelKind { kLinear, kRbf };

/// One hop level with its mixing weight.
struct MixEntry {
  Hop hop;
  double alpha;
};

/// Weights of a kernel mixture over hop levels, plus an optional feature kernel.
struct MixSpec {
  std::vector<MixEntry> entries;
  std::optional<double> feature_alpha;

  /// Throws ConfigError unless all weights are positive and hops distinct.
  void validate() const;

  /// Weight applied to the structural part when a feature kernel is present.
  double structure_alpha() const noexcept { return feature_alpha ? 1.0 / (1.0 + *feature_alpha) : 1.0; }
};

/// Mixture sum_k alpha_k K^k (+ feature term), with `hop_kernels` aligned to spec.entries.
KernelMatrix mix(const MixSpec& spec, std::span<const KernelMatrix* const> hop_kernels,
                 const KernelMatrix* feature_kernel = nullptr);

}  // namespace wlks
