#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wlks/color_table.hpp"
#include "wlks/graph.hpp"

namespace wlks {

/// Hop level for WLS^k. The global level stands for "the neighborhood is the
/// whole graph" and is served by one refinement of the global graph.
class Hop {
 public:
  constexpr explicit Hop(std::uint32_t k) : value_(k) {}
  static constexpr Hop global() { return Hop(kGlobalValue); }

  constexpr bool is_global() const noexcept { return value_ == kGlobalValue; }
  constexpr std::uint32_t value() const noexcept { return value_; }

  /// "0", "1", ... or "global". parse() also accepts "D".
  std::string to_string() const;
  static Hop parse(std::string_view text);

  friend constexpr auto operator<=>(Hop, Hop) = default;

 private:
  static constexpr std::uint32_t kGlobalValue = 0xFFFFFFFFu;
  std::uint32_t value_;
};

/// Node colors of one graph at one iteration.
struct Coloring {
  std::size_t iteration = 0;
  std::vector<ColorId> colors;
};

/// Colorings for iterations 0..T. `stable_iteration` is the first iteration
/// whose partition is never split again (empty if it still changed at T).
struct Refinement {
  std::vector<Coloring> iterations;
  std::optional<std::size_t> stable_iteration;
};

/// 1-WL refinement of one graph against a shared table. `init_labels` holds
/// one categorical label per node; these are mapped through the table's
/// iteration-0 namespace.
Refinement wl_refine(const Graph& g, std::span<const std::uint32_t> init_labels,
                     std::size_t iterations, ColorTable& table);

/// Refines several graphs in lockstep. New signatures are merged into the
/// table once per iteration, so the result is independent of `schedule`
/// (a processing order over the graphs) and of `threads`.
std::vector<Refinement> wl_refine_batch(std::span<const Graph* const> graphs,
                                        std::span<const std::vector<std::uint32_t>> init_labels,
                                        std::size_t iterations, ColorTable& table,
                                        unsigned threads = 1,
                                        std::span<const std::size_t> schedule = {});

/// Sparse color histogram for one subgraph at one iteration; bins are sorted
/// by color id and every count is positive.
struct ColorHistogram {
  std::uint64_t namespace_id = 0;
  std::size_t iteration = 0;
  std::size_t owner = 0;
  std::vector<std::pair<ColorId, std::uint32_t>> bins;

  std::uint64_t total() const noexcept;
  friend bool operator==(const ColorHistogram&, const ColorHistogram&) = default;
};

/// Histograms for iterations 0..T of one subgraph.
using HistogramStack = std::vector<ColorHistogram>;

/// Unit-L2 rescaling of a histogram.
struct NormalizedHistogram {
  std::uint64_t namespace_id = 0;
  std::size_t iteration = 0;
  std::vector<std::pair<ColorId, double>> bins;
};

NormalizedHistogram normalize_histogram(const ColorHistogram& h);

struct WlsOptions {
  std::size_t iterations = 3;
  /// Run hop 0 on the induced edge set instead of the subgraph's own edges.
  bool k0_induced = false;
  /// For finite k >= 1, give nodes outside the subgraph a distinct initial label.
  bool mark_internal = false;
  /// Optional categorical node attribute seeding the initial colors (size N).
  std::vector<std::uint32_t> node_attributes;
  unsigned threads = 1;
};

/// Memoized refinement of the whole global graph. Computed at most once per
/// instance for the largest iteration count requested so far; smaller
/// requests reuse the prefix. Safe to call from several threads.
class GlobalColoringCache {
 public:
  GlobalColoringCache(const GlobalGraph& g, ColorTable& table,
                      std::vector<std::uint32_t> node_attributes = {});

  /// Refinement with at least iterations + 1 levels.
  const Refinement& get(std::size_t iterations, unsigned threads = 1);
  std::size_t computations() const noexcept { return computations_; }

 private:
  const GlobalGraph* graph_;
  ColorTable* table_;
  std::vector<std::uint32_t> attributes_;
  std::unique_ptr<Refinement> cached_;
  std::vector<std::unique_ptr<Refinement>> retired_;
  std::size_t computations_ = 0;
  std::mutex mutex_;
};

/// Per-iteration colors of a subgraph's own nodes (in sorted node order).
struct SubgraphColoring {
  std::vector<NodeId> nodes;
  std::vector<std::vector<ColorId>> colors;  // [iteration][node]
  std::optional<std::size_t> stable_iteration;
};

/// WLS^k colorings for a batch of subgraphs.
std::vector<SubgraphColoring> wls_colorings(const GlobalGraph& g, std::span<const Subgraph> subs, Hop hop,
                                            const WlsOptions& opts, ColorTable& table,
                                            GlobalColoringCache* cache = nullptr,
                                            std::span<const std::size_t> schedule = {});

/// Aggregates a coloring into per-iteration histograms.
HistogramStack histograms_of(const SubgraphColoring& coloring, std::uint64_t namespace_id, std::size_t owner);

/// WLS^k histogram stacks (iterations 0..T) for a batch of subgraphs;
/// result[i].owner == first_owner + i.
std::vector<HistogramStack> wls_batch(const GlobalGraph& g, std::span<const Subgraph> subs, Hop hop,
                                      const WlsOptions& opts, ColorTable& table,
                                      GlobalColoringCache* cache = nullptr,
                                      std::span<const std::size_t> schedule = {},
                                      std::size_t first_owner = 0);

HistogramStack wls_k(const Subgraph& sub, const GlobalGraph& g, Hop hop, const WlsOptions& opts,
                     ColorTable& table, GlobalColoringCache* cache = nullptr);

}  // namespace wlks
