#include "canopy/map/inflated_grid.hpp"

#include <algorithm>
#include <stdexcept>

#include "canopy/map/offsets.hpp"

namespace canopy::map {

InflatedGrid::InflatedGrid(const GridConfig& cfg, const GridWindow& window)
    : window_(window),
      offsets_occ_(precompute_offsets(cfg.r_occ, cfg.resolution)),
      offsets_unk_(precompute_offsets(cfg.r_unk, cfg.resolution)),
      n_occ_(window.size(), 0),
      n_unk_(window.size(), static_cast<std::uint16_t>(offsets_unk_.size())) {
  reach_ = std::max({offset_reach(offsets_occ_), offset_reach(offsets_unk_), 1});
}

void InflatedGrid::adjust(const Index3& cell, const std::vector<Index3>& offsets,
                          std::vector<std::uint16_t>& counters, int delta,
                          const IndexBox* include, const IndexBox* exclude) {
  for (const auto& o : offsets) {
    const Index3 t = cell + o;
    if (!window_.contains(t)) continue;
    if (include && !include->contains(t)) continue;
    if (exclude && exclude->contains(t)) continue;
    auto& n = counters[window_.slot(t)];
    if (delta < 0 && n == 0) throw std::logic_error("inflation counter underflow");
    n = static_cast<std::uint16_t>(n + delta);
  }
}

void InflatedGrid::on_state_change_inflate(const Index3& cell, CellState from, CellState to,
                                           const IndexBox* include, const IndexBox* exclude) {
  const int d_occ = int(to == CellState::Occupied) - int(from == CellState::Occupied);
  const int d_unk = int(to == CellState::Unknown) - int(from == CellState::Unknown);
  if (d_occ != 0) adjust(cell, offsets_occ_, n_occ_, d_occ, include, exclude);
  if (d_unk != 0) adjust(cell, offsets_unk_, n_unk_, d_unk, include, exclude);
}

void InflatedGrid::reset_cell(const Index3& g) {
  const std::size_t s = window_.slot(g);
  n_occ_[s] = 0;
  n_unk_[s] = static_cast<std::uint16_t>(offsets_unk_.size());
}

void InflatedGrid::reset_all() {
  std::fill(n_occ_.begin(), n_occ_.end(), 0);
  std::fill(n_unk_.begin(), n_unk_.end(), static_cast<std::uint16_t>(offsets_unk_.size()));
}

}  // namespace canopy::map
