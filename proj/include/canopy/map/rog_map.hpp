#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "canopy/common/sensor_types.hpp"
#include "canopy/map/inflated_grid.hpp"
#include "canopy/map/probability_grid.hpp"

namespace canopy::map {

/// Robot-centric occupancy map: a probability grid and an inflated grid over
/// the same sliding window. Every CellState transition is dispatched to both
/// the inflation and frontier counters from one place, so the two derived
/// structures always see the same history.
///
/// Single writer. Readers must not run concurrently with integrate_scan() or
/// slide_to(); the harness serializes them.
class RogMap {
 public:
  explicit RogMap(const GridConfig& cfg, const Vec3& center = Vec3::Zero());

  const GridConfig& config() const { return cfg_; }
  const GridWindow& window() const { return prob_.window(); }
  const ProbabilityGrid& probability() const { return prob_; }
  const InflatedGrid& inflated() const { return infl_; }

  Index3 cell_of(const Vec3& p) const { return window().cell_of(p); }
  Vec3 center_of(const Index3& g) const { return window().center_of(g); }
  bool in_window(const Index3& g) const { return window().contains(g); }

  CellState state_at(const Vec3& p) const { return prob_.state(cell_of(p)); }
  InflationState inflated_state_at(const Vec3& p) const { return infl_.state(cell_of(p)); }
  bool is_frontier(const Index3& g) const { return prob_.is_frontier(g); }

  /// One measurement on one cell; out-of-window cells are ignored.
  void update(const Index3& g, Measurement m, std::vector<CellTransition>* out = nullptr);
  /// Direct write, used for bootstrapping and tests. Clamped to [l_min, l_max].
  void set_log_odds(const Index3& g, double l, std::vector<CellTransition>* out = nullptr);

  /// Directions along which no Occupied cell is crossed within
  /// infinite_check_range of `origin`.
  std::vector<Vec3> classify_infinite_points(const Vec3& origin,
                                             std::span<const Vec3> invalid_dirs) const;

  /// Fuses one scan: hits at valid endpoints, misses on the cells each ray
  /// crosses before its endpoint cell, and misses out to the window boundary
  /// for invalid returns classified as sky. Returns every state transition
  /// in the order applied.
  std::vector<CellTransition> integrate_scan(const LidarScan& scan);

  /// Moves the window so that it is centered on `center` (whole cells).
  /// Returns false if the origin did not change.
  bool slide_to(const Vec3& center);
  /// Slides only if `p` is farther than slide_threshold from the window center.
  bool recenter(const Vec3& p);

  /// Writes "x y z state" lines for every non-Unknown cell (or every cell
  /// when `include_unknown`), cell centers in meters.
  void dump(std::ostream& os, bool include_unknown = false) const;

  std::size_t occupied_count() const;

 private:
  void dispatch(const CellTransition& t, std::vector<CellTransition>* out);

  GridConfig cfg_;
  ProbabilityGrid prob_;
  InflatedGrid infl_;
};

}  // namespace canopy::map
