#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "wlks/kernel_matrix.hpp"

namespace wlks {

/// Binary soft-margin SVM dual over a precomputed training gram.
struct BinaryProblem {
  const KernelMatrix* kernel = nullptr;
  std::vector<int> y;  // +1 / -1
  double C = 1.0;
};

struct SmoOptions {
  /// KKT tolerance (maximal violating pair gap at termination).
  double tol = 1e-3;
  /// Limit in sweeps of n pair updates; 0 selects 10 * n.
  std::size_t max_passes = 0;
  std::uint64_t seed = 0;
  /// Record the dual objective after every update (for diagnostics/tests).
  bool trace_objective = false;
};

struct SvmModel {
  std::vector<double> alpha;  // dual coefficients in [0, C]
  std::vector<int> y;
  double bias = 0;
  double C = 0;
  bool converged = true;
  /// Set when the training labels all share one sign; predicts that sign.
  bool degenerate = false;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;

  std::vector<std::size_t> support() const;
  /// Largest per-sample KKT violation of this model against the training gram.
  double max_kkt_violation(const KernelMatrix& k) const;
  double dual_objective(const KernelMatrix& k) const;
};

/// Sequential minimal optimization: first index is the maximal KKT violator,
/// second maximizes (E_i - E_j)^2 / eta_ij over the opposite index set, with a
/// seeded random fallback when that pair makes no progress.
SvmModel smo_train(const BinaryProblem& prob, const SmoOptions& opts = {});

/// f(x) = sum_i alpha_i y_i K(x, i) + b for each row of a test x train gram.
std::vector<double> decision(const SvmModel& model, const KernelMatrix& cross);

using LabelSet = std::vector<std::uint32_t>;

/// One-vs-rest ensemble; class c's binary problem is "+1 iff c in labels".
struct MulticlassModel {
  std::vector<SvmModel> per_class;
  bool multi_label = false;

  std::size_t num_classes() const noexcept { return per_class.size(); }

  /// scores[c][i] for each test row.
  std::vector<std::vector<double>> scores(const KernelMatrix& cross) const;
  /// Single-label: argmax (ties to the lowest class id). Multi-label: every
  /// class with a positive score, or the argmax when none is positive.
  std::vector<LabelSet> predict(const KernelMatrix& cross) const;
};

MulticlassModel fit_multiclass(const KernelMatrix& train, std::span<const LabelSet> labels, std::size_t num_classes,
                               double C, bool multi_label, const SmoOptions& opts = {}, unsigned threads = 1);

/// Micro-averaged F1 over (sample, class) pairs. Equals accuracy for single labels.
double micro_f1(std::span<const LabelSet> pred, std::span<const LabelSet> gold);

/// Text dump per class: C and bias, then (train position, alpha * y) pairs.
void write_model(const MulticlassModel& m, std::ostream& out);
MulticlassModel read_model(std::istream& in, std::size_t train_size);

}  // namespace wlks
