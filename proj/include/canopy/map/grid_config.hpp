#pragma once

#include "canopy/common/geometry.hpp"
#include "canopy/map/log_odds.hpp"

namespace canopy::map {

enum class CellState : unsigned char { Unknown = 0, Occupied = 1, KnownFree = 2 };

/// Inflated-map states, defined by the (N_occ, N_unk) counters.
enum class InflationState : unsigned char { NoInflation = 0, UnknownInflation = 1, OccupiedInflation = 2 };

const char* to_string(CellState s);
const char* to_string(InflationState s);

struct GridConfig {
  double resolution = 0.1;
  Index3 dims{256, 256, 128};

  double p_hit = 0.70;
  double p_miss = 0.40;
  // Thresholds are inclusive: L >= l_occ is Occupied, L <= l_free is Known Free.
  double l_occ = prob_to_logodds(0.70);
  double l_free = prob_to_logodds(0.30);
  double l_min = -2.0;
  double l_max = 3.5;

  double r_occ = 0.422;
  double r_unk = 0.422;
  double raycast_range = 20.0;
  // Invalid returns are treated as sky rays only if no Occupied cell lies
  // within this distance along the ray.
  double infinite_check_range = 1.0;
  // The window recenters when the vehicle is farther than this from its center.
  double slide_threshold = 1.0;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  double l_hit() const { return prob_to_logodds(p_hit); }
  double l_miss() const { return prob_to_logodds(p_miss); }
  CellState classify(double l) const {
    if (l >= l_occ) return CellState::Occupied;
    if (l <= l_free) return CellState::KnownFree;
    return CellState::Unknown;
  }
};

/// clamp(l_prev + l_meas, l_min, l_max).
double update_log_odds(double l_prev, Measurement m, const GridConfig& cfg);

}  // namespace canopy::map
