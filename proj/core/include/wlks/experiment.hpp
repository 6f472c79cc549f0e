#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wlks/color_table.hpp"
#include "wlks/config.hpp"
#include "wlks/datagen.hpp"
#include "wlks/kernel.hpp"
#include "wlks/svm.hpp"

namespace wlks {

/// Wall time of `work` on the monotonic clock.
template <class F>
std::chrono::duration<double> time_phase(F&& work) {
  const auto start = std::chrono::steady_clock::now();
  work();
  return std::chrono::steady_clock::now() - start;
}

/// Accumulates phase durations by label.
class PhaseClock {
 public:
  template <class F>
  std::chrono::duration<double> time_phase(std::string_view label, F&& work) {
    const auto d = wlks::time_phase(std::forward<F>(work));
    add(label, d.count());
    return d;
  }

  void add(std::string_view label, double seconds);
  double seconds(std::string_view label) const;

 private:
  std::map<std::string, double, std::less<>> totals_;
};

/// Builds every kernel the grid needs from one dataset: WL histograms per hop
/// (computed once at the largest T and reused as prefixes), and an optional
/// standardized feature kernel. All subgraphs share one color table; the
/// train batch is refined first so its colors come before any others.
class KernelPipeline {
 public:
  KernelPipeline(const Dataset& data, const ExperimentConfig& cfg);

  /// Runs WL on train then eval subgraphs up to `max_iterations`.
  void prepare(std::span<const std::size_t> train, std::span<const std::size_t> eval, std::size_t max_iterations);

  struct HopGrams {
    std::vector<KernelMatrix> train;  // per hop, |train| x |train|
    std::vector<KernelMatrix> cross;  // per hop, |eval| x |train|
  };
  HopGrams hop_grams(std::size_t iterations, bool combine, bool normalize) const;
  /// Per hop, eval rows [first, first + count) against train.
  std::vector<KernelMatrix> hop_cross(std::size_t iterations, bool combine, bool normalize, std::size_t first,
                                      std::size_t count) const;

  /// Builds the feature kernels (standardized on train rows) when the config
  /// selects a feature source; a no-op otherwise.
  void prepare_features(std::span<const std::size_t> train, std::span<const std::size_t> eval);

  struct FeatureGrams {
    KernelMatrix train;
    KernelMatrix cross;
  };
  /// Null unless the config selects a feature source.
  const FeatureGrams* feature_grams() const noexcept { return features_ ? &*features_ : nullptr; }

  std::size_t prepared_iterations() const noexcept { return max_iterations_; }
  const std::vector<std::vector<HistogramStack>>& train_stacks() const noexcept { return train_stacks_; }
  const std::vector<std::vector<HistogramStack>>& eval_stacks() const noexcept { return eval_stacks_; }

 private:
  const Dataset* data_;
  const ExperimentConfig* cfg_;
  ColorTable table_;
  std::size_t max_iterations_ = 0;
  std::vector<std::vector<HistogramStack>> train_stacks_;  // [hop][subgraph]
  std::vector<std::vector<HistogramStack>> eval_stacks_;
  std::optional<FeatureGrams> features_;
};

/// One evaluated grid point.
struct GridPoint {
  std::size_t iterations = 1;
  bool combine = false;
  bool normalize = false;
  std::optional<double> alpha0;
  std::optional<double> alpha_feature;
  double C = 1.0;
  double val_f1 = 0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct PhaseTimings {
  double wl = 0;
  double kernel = 0;
  double svm = 0;
  double total = 0;
  double inference = 0;
};

struct RunReport {
  std::string dataset_id;
  std::string hops;
  std::string feature;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;
  std::vector<GridPoint> grid;
  std::size_t selected = 0;
  double test_f1 = 0;
  PhaseTimings timings;

  const GridPoint& selected_point() const { return grid.at(selected); }
};

/// A trained model with enough context to re-score other subgraphs.
struct TrainedModel {
  GridPoint point;
  std::vector<std::size_t> train_indices;
  MulticlassModel model;
};

struct ExperimentResult {
  RunReport report;
  TrainedModel model;
};

/// Loads (or generates) the dataset named by the config.
Dataset load_experiment_data(const ExperimentConfig& cfg);
std::string dataset_id(const ExperimentConfig& cfg);

/// Grid search in (T, combine, normalize, alpha0, alpha_feature, C) order,
/// selection on val micro-F1 (ties keep the earliest point), then test scoring.
ExperimentResult run_experiment_with_model(const ExperimentConfig& cfg, const Dataset& data);
RunReport run_experiment(const ExperimentConfig& cfg);

/// Index of the best val score; ties resolve to the first.
std::size_t select_best(std::span<const GridPoint> grid);

/// Model dump: the selected grid point, the train indices, then the SVMs.
void write_trained_model(const TrainedModel& m, const ExperimentConfig& cfg, std::ostream& out);
/// Reads a dump and applies its settings (hops, flags, feature source) to `cfg`.
TrainedModel read_trained_model(std::istream& in, ExperimentConfig& cfg);

/// Scores `rows` with a trained model; returns micro-F1 and the predictions.
struct EvalResult {
  double f1 = 0;
  std::vector<LabelSet> predictions;
};
EvalResult evaluate_model(const TrainedModel& m, const ExperimentConfig& cfg, const Dataset& data,
                          std::span<const std::size_t> rows);

}  // namespace wlks
