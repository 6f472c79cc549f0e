#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wlks {

using ColorId = std::uint32_t;

/// A refinement signature: previous color followed by the sorted multiset of
/// neighbor colors. Iteration 0 signatures are the initial node attributes.
using Signature = std::u32string;
using SignatureView = std::u32string_view;

/// Shared color namespace for one run. Per iteration it maps each distinct
/// signature to a color id. Ids are handed out only through register_new(),
/// which sorts the batch lexicographically first, so the table contents depend
/// on the set of signatures seen and never on processing order.
class ColorTable {
 public:
  ColorTable();

  /// Identifier of this namespace; histograms built against different tables
  /// carry different ids and must not be compared.
  std::uint64_t namespace_id() const noexcept { return namespace_id_; }

  std::optional<ColorId> find(std::size_t iteration, SignatureView sig) const;

  /// Assigns consecutive ids to the signatures in `batch` that are not yet
  /// known, in lexicographic order. Duplicates in the batch are fine.
  void register_new(std::size_t iteration, std::vector<SignatureView> batch);

  /// Number of colors known at an iteration.
  std::size_t num_colors(std::size_t iteration) const noexcept;
  std::size_t num_iterations() const noexcept { return levels_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(SignatureView s) const noexcept { return std::hash<SignatureView>{}(s); }
  };
  struct Level {
    std::unordered_map<Signature, ColorId, Hash, std::equal_to<>> ids;
  };

  std::vector<Level> levels_;
  std::uint64_t namespace_id_;
};

}  // namespace wlks
