#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wlks/features.hpp"
#include "wlks/graph.hpp"

namespace wlks {

enum class TaskKind { kDensity, kCutRatio, kCoreness, kComponent };

const char* to_string(TaskKind k) noexcept;
TaskKind parse_task_kind(std::string_view text);

/// Parameters of one synthetic subgraph-classification task.
struct TaskSpec {
  TaskKind task = TaskKind::kDensity;
  std::size_t num_nodes = 1000;
  /// Mean degree of the Erdos-Renyi base graph.
  double mean_degree = 16.0;
  std::size_t num_subgraphs = 150;
  std::size_t min_size = 20;
  std::size_t max_size = 20;
  std::size_t num_classes = 3;
  std::uint64_t seed = 0;
  /// Also emit a small per-node continuous feature matrix.
  bool with_features = false;

  /// Calibrated defaults for each task.
  static TaskSpec defaults(TaskKind kind);
  /// Throws ConfigError for infeasible or non-positive parameters.
  void validate() const;
};

struct Dataset {
  GlobalGraph graph;
  SubgraphSet subgraphs;
  std::optional<FeatureMatrix> features;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct GeneratedTask {
  Dataset data;
  /// The true structural property of every subgraph.
  std::vector<double> property;
  /// Class boundaries: label = number of thresholds strictly below the property.
  std::vector<double> thresholds;
};

/// Structural property a task labels by, measured on the final global graph:
/// induced density, cut ratio, mean core number, or component count.
double task_property(TaskKind kind, const GlobalGraph& g, const Subgraph& sub);

/// Class id for a property value given ascending thresholds.
std::uint32_t class_of(double property, const std::vector<double>& thresholds);

GeneratedTask gen_task(const TaskSpec& spec);

/// Dataset files inside a directory: graph.txt, subgraphs.txt and, when
/// present, features.txt.
void write_dataset(const Dataset& d, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

/// Subgraphs file: per line "ids<TAB>labels<TAB>split" with space-separated
/// node ids, comma-separated labels, split in {train, val, test}.
/// Subgraph edges are the induced edges of the global graph.
SubgraphSet parse_subgraphs(std::istream& in, const GlobalGraph& g, std::optional<std::size_t> num_classes = {});
void write_subgraphs(const SubgraphSet& s, std::ostream& out);

}  // namespace wlks
