#include "canopy/map/log_odds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "canopy/map/grid_config.hpp"

namespace canopy::map {

double prob_to_logodds(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("probability must lie in (0, 1), got " + std::to_string(p));
  }
  return std::log(p / (1.0 - p));
}

double logodds_to_prob(double l) { return 1.0 / (1.0 + std::exp(-l)); }

double bayes_update_probability(double prior, double measurement, double map_prior) {
  const double odds_ratio = (1.0 - measurement) / measurement * (1.0 - prior) / prior *
                            map_prior / (1.0 - map_prior);
  return 1.0 / (1.0 + odds_ratio);
}

double update_log_odds(double l_prev, Measurement m, const GridConfig& cfg) {
  const double l_meas = m == Measurement::Hit ? cfg.l_hit() : cfg.l_miss();
  return std::clamp(l_prev + l_meas, cfg.l_min, cfg.l_max);
}

const char* to_string(CellState s) {
  switch (s) {
    case CellState::Occupied: return "occupied";
    case CellState::KnownFree: return "free";
    case CellState::Unknown: break;
  }
  return "unknown";
}

const char* to_string(InflationState s) {
  switch (s) {
    case InflationState::OccupiedInflation: return "occupied_inflation";
    case InflationState::UnknownInflation: return "unknown_inflation";
    case InflationState::NoInflation: break;
  }
  return "no_inflation";
}

void GridConfig::validate() const {
  const auto fail = [](const std::string& what) { throw std::invalid_argument("grid: " + what); };
  if (!(resolution > 0.0)) fail("resolution must be positive");
  if ((dims.array() < 3).any()) fail("dims must be at least 3 cells per axis");
  if (!(p_hit > 0.5 && p_hit < 1.0)) fail("p_hit must lie in (0.5, 1)");
  if (!(p_miss > 0.0 && p_miss < 0.5)) fail("p_miss must lie in (0, 0.5)");
  if (!(l_free < 0.0 && l_occ > 0.0)) fail("thresholds must satisfy l_free < 0 < l_occ");
  if (!(l_min <= l_free && l_max >= l_occ)) fail("clamp bounds must enclose the thresholds");
  if (!(r_occ >= 0.0 && r_unk >= 0.0)) fail("inflation radii must be non-negative");
  if (!(raycast_range > 0.0)) fail("raycast_range must be positive");
  if (!(infinite_check_range >= 0.0)) fail("infinite_check_range must be non-negative");
  // Counters are 16-bit.
  const double max_r = std::max(r_occ, r_unk) / resolution;
  if (4.19 * max_r * max_r * max_r > 60000.0) fail("inflation radius too large for 16-bit counters");
}

}  // namespace canopy::map
