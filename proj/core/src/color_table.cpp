#include "wlks/color_table.hpp"

#include <algorithm>
#include <atomic>

namespace wlks {

namespace {
std::atomic<std::uint64_t> g_next_namespace{1};
}

ColorTable::ColorTable() : namespace_id_(g_next_namespace.fetch_add(1)) {}

std::optional<ColorId> ColorTable::find(std::size_t iteration, SignatureView sig) const {
  if (iteration >= levels_.size()) return std::nullopt;
  const auto& ids = levels_[iteration].ids;
  const auto it = ids.find(sig);
  if (it == ids.end()) return std::nullopt;
  return it->second;
}

void ColorTable::register_new(std::size_t iteration, std::vector<SignatureView> batch) {
  if (levels_.size() <= iteration) levels_.resize(iteration + 1);
  auto& ids = levels_[iteration].ids;
  std::sort(batch.begin(), batch.end());
  batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
  for (auto sig : batch) {
    if (ids.find(sig) != ids.end()) continue;
    const auto id = static_cast<ColorId>(ids.size());
    ids.emplace(Signature(sig), id);
  }
}

std::size_t ColorTable::num_colors(std::size_t iteration) const noexcept {
  return iteration < levels_.size() ? levels_[iteration].ids.size() : 0;
}

}  // namespace wlks
