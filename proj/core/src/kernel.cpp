#include "wlks/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "wlks/error.hpp"
#include "wlks/parallel.hpp"

namespace wlks {

namespace {

std::uint64_t dot_counts(const ColorHistogram& a, const ColorHistogram& b) {
  std::uint64_t sum = 0;
  auto i = a.bins.begin();
  auto j = b.bins.begin();
  while (i != a.bins.end() && j != b.bins.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      sum += static_cast<std::uint64_t>(i->second) * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

double dot_unit(const NormalizedHistogram& a, const NormalizedHistogram& b) {
  double sum = 0;
  auto i = a.bins.begin();
  auto j = b.bins.begin();
  while (i != a.bins.end() && j != b.bins.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      sum += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

// The iteration levels that enter the kernel.
std::vector<std::size_t> levels(const GramOptions& opts) {
  std::vector<std::size_t> out;
  if (opts.combine_all_iterations) {
    for (std::size_t t = 0; t <= opts.iterations; ++t) out.push_back(t);
  } else {
    out.push_back(opts.iterations);
  }
  return out;
}

void check_stacks(std::span<const HistogramStack> stacks, const GramOptions& opts,
                  std::optional<std::uint64_t>& ns) {
  for (const auto& s : stacks) {
    if (s.size() <= opts.iterations) {
      throw ContractError("gram: histogram stack has " + std::to_string(s.size()) +
                          " levels, need " + std::to_string(opts.iterations + 1));
    }
    for (std::size_t t = 0; t <= opts.iterations; ++t) {
      if (!ns) ns = s[t].namespace_id;
      if (s[t].namespace_id != *ns) throw ContractError("gram: histograms from different color namespaces");
    }
  }
}

// Entry (i, j) for the chosen options; normalized stacks are precomputed by the caller.
struct Side {
  std::span<const HistogramStack> raw;
  std::vector<std::vector<NormalizedHistogram>> unit;  // [subgraph][level index]
};

Side prepare(std::span<const HistogramStack> stacks, const GramOptions& opts, const std::vector<std::size_t>& lv) {
  Side s{stacks, {}};
  if (opts.normalize) {
    s.unit.resize(stacks.size());
    parallel_for(stacks.size(), opts.threads, [&](std::size_t i) {
      for (std::size_t t : lv) s.unit[i].push_back(normalize_histogram(stacks[i][t]));
    });
  }
  return s;
}

double entry(const Side& a, std::size_t i, const Side& b, std::size_t j, const GramOptions& opts,
             const std::vector<std::size_t>& lv) {
  if (opts.normalize) {
    double sum = 0;
    for (std::size_t l = 0; l < lv.size(); ++l) sum += dot_unit(a.unit[i][l], b.unit[j][l]);
    return sum;
  }
  std::uint64_t sum = 0;
  for (std::size_t t : lv) sum += dot_counts(a.raw[i][t], b.raw[j][t]);
  return static_cast<double>(sum);
}

}  // namespace

KernelMatrix gram_from_histograms(std::span<const HistogramStack> stacks, const GramOptions& opts) {
  std::optional<std::uint64_t> ns;
  check_stacks(stacks, opts, ns);
  const auto lv = levels(opts);
  const Side side = prepare(stacks, opts, lv);
  const std::size_t m = stacks.size();
  KernelMatrix k(m, m, true);
  parallel_for(m, opts.threads, [&](std::size_t i) {
    for (std::size_t j = i; j < m; ++j) k(i, j) = entry(side, i, side, j, opts, lv);
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) k(i, j) = k(j, i);
  }
  return k;
}

KernelMatrix cross_gram(std::span<const HistogramStack> rows, std::span<const HistogramStack> cols,
                        const GramOptions& opts) {
  std::optional<std::uint64_t> ns;
  check_stacks(rows, opts, ns);
  check_stacks(cols, opts, ns);
  const auto lv = levels(opts);
  const Side r = prepare(rows, opts, lv);
  const Side c = prepare(cols, opts, lv);
  KernelMatrix k(rows.size(), cols.size());
  parallel_for(rows.size(), opts.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j) k(i, j) = entry(r, i, c, j, opts, lv);
  });
  return k;
}

KernelMatrix combine(std::span<const WeightedKernel> parts) {
  if (parts.empty()) throw ContractError("combine: no kernels");
  const auto& first = *parts.front().matrix;
  bool sym = true;
  for (const auto& p : parts) {
    if (!(p.weight > 0) || !std::isfinite(p.weight)) throw ContractError("combine: weights must be positive");
    if (p.matrix->rows() != first.rows() || p.matrix->cols() != first.cols()) {
      throw ContractError("combine: shape mismatch");
    }
    sym = sym && p.matrix->symmetric();
  }
  KernelMatrix out(first.rows(), first.cols(), sym);
  auto dst = out.values();
  for (const auto& p : parts) {
    const auto src = p.matrix->values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += p.weight * src[i];
  }
  return out;
}

PsdResult psd_check(const KernelMatrix& k, double tol) {
  if (!k.is_exactly_symmetric()) throw ContractError("psd_check: matrix is not symmetric");
  const auto n = static_cast<Eigen::Index>(k.rows());
  if (n == 0) return {0.0, true};
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      k.values().data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ContractError("psd_check: eigensolver did not converge");
  const double lmin = solver.eigenvalues().minCoeff();
  return {lmin, lmin >= -tol * std::max(1.0, k.trace())};
}

void MixSpec::validate() const {
  if (entries.empty()) throw ConfigError("mix: at least one hop level required");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i].alpha > 0)) throw ConfigError("mix: hop weights must be positive");
    for (std::size_t j = 0; j < i; ++j) {
      if (entries[i].hop == entries[j].hop) throw ConfigError("mix: duplicate hop " + entries[i].hop.to_string());
    }
  }
  if (feature_alpha && !(*feature_alpha > 0)) throw ConfigError("mix: feature weight must be positive");
}

KernelMatrix mix(const MixSpec& spec, std::span<const KernelMatrix* const> hop_kernels,
                 const KernelMatrix* feature_kernel) {
  spec.validate();
  if (hop_kernels.size() != spec.entries.size()) throw ContractError("mix: one kernel per hop entry required");
  const double s = spec.structure_alpha();
  std::vector<WeightedKernel> parts;
  for (std::size_t i = 0; i < hop_kernels.size(); ++i) {
    parts.push_back({hop_kernels[i], s * spec.entries[i].alpha});
  }
  if (spec.feature_alpha) {
    if (feature_kernel == nullptr) throw ContractError("mix: feature weight given without a feature kernel");
    parts.push_back({feature_kernel, *spec.feature_alpha});
  }
  return combine(parts);
}

}  // namespace wlks
