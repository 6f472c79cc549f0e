#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wlks/datagen.hpp"
#include "wlks/kernel.hpp"
#include "wlks/svm.hpp"
#include "wlks/wl.hpp"

namespace wlks {

/// Grids used when a config leaves them unset.
namespace grids {
std::vector<std::size_t> iterations();  // {1, 2, 3, 4, 5}
std::vector<double> regularization();   // {2^3/100, ..., 2^14/100}
std::vector<double> alpha0();           // {0.999, 0.99, 0.9, 0.5, 0.1, 0.01, 0.001}
std::vector<double> alpha_feature();    // {0.0001, 0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.25}
}  // namespace grids

/// Where the continuous kernel of a structure + feature mixture comes from.
enum class FeatureSource {
  kNone,
  kRaw,           // node features summed per subgraph
  kContinuousWl,  // continuous WL embedding summed per subgraph
  kRwse,          // random-walk return probabilities summed per subgraph
};

const char* to_string(FeatureSource s) noexcept;

struct ExperimentConfig {
  std::optional<std::filesystem::path> dataset_dir;
  std::optional<TaskSpec> task;

  std::vector<Hop> hops{Hop(0), Hop::global()};
  std::vector<std::size_t> iterations_grid = grids::iterations();
  std::vector<bool> combine_grid{false, true};
  std::vector<bool> normalize_grid{false, true};
  std::vector<double> c_grid = grids::regularization();
  std::vector<double> alpha0_grid = grids::alpha0();

  FeatureSource feature_source = FeatureSource::kNone;
  FeatureKernelKind feature_kind = FeatureKernelKind::kLinear;
  std::optional<double> rbf_gamma;
  std::vector<double> alpha_feature_grid = grids::alpha_feature();
  std::size_t rwse_length = 64;
  std::size_t cwl_iterations = 3;

  bool k0_induced = false;
  bool mark_internal = false;

  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t repeats = 1;
  SmoOptions smo;

  /// Throws ConfigError when grids are empty or values out of range.
  void validate() const;

  /// Hop weights for a given alpha_0. A single hop gets weight 1. Otherwise
  /// hop 0 (or the first listed hop when 0 is absent) gets alpha_0 and the
  /// remaining hops share 1 - alpha_0 equally.
  MixSpec mix_for(std::optional<double> alpha0, std::optional<double> alpha_feature) const;
  bool mixes_hops() const noexcept { return hops.size() > 1; }
};

/// Applies one key=value setting (comma-separated lists). Throws ConfigError
/// on unknown keys or malformed values.
void set_config_key(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value text; `#` starts a comment line.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

std::string format_double(double v);
std::string join_hops(const std::vector<Hop>& hops);

}  // namespace wlks
