#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "canopy/map/grid_config.hpp"
#include "canopy/map/grid_window.hpp"

namespace canopy::map {

struct CellTransition {
  Index3 cell;
  CellState from;
  CellState to;
};

/// Log-odds occupancy over the sliding window, with the cached CellState and
/// the Known-Free neighborhood counter n_f used for frontier extraction.
class ProbabilityGrid {
 public:
  static constexpr int kNeighborhood = 27;

  ProbabilityGrid(const GridConfig& cfg, const GridWindow& window);

  const GridConfig& config() const { return cfg_; }
  const GridWindow& window() const { return window_; }

  /// Cells outside the window read as Unknown with n_f = 0.
  CellState state(const Index3& g) const {
    return window_.contains(g) ? state_[window_.slot(g)] : CellState::Unknown;
  }
  double log_odds(const Index3& g) const {
    return window_.contains(g) ? log_odds_[window_.slot(g)] : 0.0;
  }
  int frontier_counter(const Index3& g) const {
    return window_.contains(g) ? n_f_[window_.slot(g)] : 0;
  }
  /// Unknown with some, but not all, of its 27-neighborhood Known Free.
  bool is_frontier(const Index3& g) const {
    if (!window_.contains(g)) return false;
    const std::size_t s = window_.slot(g);
    return state_[s] == CellState::Unknown && n_f_[s] > 0 && n_f_[s] < kNeighborhood;
  }

  /// Applies one hit/miss. Returns the state transition, if any. Does not
  /// touch n_f; the caller dispatches transitions.
  std::optional<CellTransition> apply(const Index3& g, Measurement m);
  std::optional<CellTransition> set_log_odds(const Index3& g, double l);

  /// n_f maintenance for one transition, restricted to targets inside
  /// `include` (when given) and outside `exclude` (when given).
  void on_state_change_frontier(const Index3& cell, CellState from, CellState to,
                                const IndexBox* include = nullptr,
                                const IndexBox* exclude = nullptr);

  // Sliding support.
  void set_origin(const Index3& origin) { window_.set_origin(origin); }
  void reset_cell(const Index3& g);
  void reset_all();

 private:
  GridConfig cfg_;
  GridWindow window_;
  double l_hit_;
  double l_miss_;
  std::vector<double> log_odds_;
  std::vector<CellState> state_;
  std::vector<std::uint8_t> n_f_;
};

}  // namespace canopy::map
