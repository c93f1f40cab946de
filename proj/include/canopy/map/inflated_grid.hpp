#pragma once

#include <cstdint>
#include <vector>

#include "canopy/map/grid_config.hpp"
#include "canopy/map/grid_window.hpp"

namespace canopy::map {

/// Counter-based inflation. Each cell keeps N_occ, the number of Occupied
/// cells whose I_occ neighborhood covers it, and N_unk, the same for Unknown
/// cells over I_unk. Space outside the window counts as Unknown.
class InflatedGrid {
 public:
  InflatedGrid(const GridConfig& cfg, const GridWindow& window);

  const GridWindow& window() const { return window_; }
  const std::vector<Index3>& offsets_occ() const { return offsets_occ_; }
  const std::vector<Index3>& offsets_unk() const { return offsets_unk_; }
  /// Chebyshev reach of the larger offset set.
  int reach() const { return reach_; }

  /// Outside the window: UnknownInflation.
  InflationState state(const Index3& g) const {
    if (!window_.contains(g)) return InflationState::UnknownInflation;
    const std::size_t s = window_.slot(g);
    if (n_occ_[s] > 0) return InflationState::OccupiedInflation;
    if (n_unk_[s] > 0) return InflationState::UnknownInflation;
    return InflationState::NoInflation;
  }
  bool is_free(const Index3& g) const { return state(g) == InflationState::NoInflation; }

  int n_occ(const Index3& g) const { return window_.contains(g) ? n_occ_[window_.slot(g)] : 0; }
  int n_unk(const Index3& g) const {
    return window_.contains(g) ? n_unk_[window_.slot(g)] : static_cast<int>(offsets_unk_.size());
  }

  /// Counter maintenance for one probability-grid transition. Targets are
  /// restricted like ProbabilityGrid::on_state_change_frontier. Throws
  /// std::logic_error if a counter would go negative.
  void on_state_change_inflate(const Index3& cell, CellState from, CellState to,
                               const IndexBox* include = nullptr,
                               const IndexBox* exclude = nullptr);

  void set_origin(const Index3& origin) { window_.set_origin(origin); }
  void reset_cell(const Index3& g);
  void reset_all();

 private:
  void adjust(const Index3& cell, const std::vector<Index3>& offsets,
              std::vector<std::uint16_t>& counters, int delta, const IndexBox* include,
              const IndexBox* exclude);

  GridWindow window_;
  std::vector<Index3> offsets_occ_;
  std::vector<Index3> offsets_unk_;
  int reach_ = 1;
  std::vector<std::uint16_t> n_occ_;
  std::vector<std::uint16_t> n_unk_;
};

}  // namespace canopy::map
