#pragma once

#include <numbers>
#include <random>

#include "canopy/common/sensor_types.hpp"
#include "canopy/sim/plant.hpp"
#include "canopy/sim/world.hpp"

namespace canopy::sim {

struct LidarConfig {
  int points_per_scan = 6667;
  double max_range = 40.0;
  double range_sigma = 0.02;                       // m, truncated at 4 sigma
  double elevation_half_fov = 29.5 * std::numbers::pi / 180.0;  // rad
  bool near_blind = true;                          // apply the near-range dropout ramp
  Vec3 mount_offset = Vec3::Zero();                // body frame
};

/// Probability that a return at true distance d is dropped:
/// clamp(0.8 - 0.7 (d - 0.1) / 0.9, 0, 0.8) below 1 m, 0 from 1 m on.
double near_blind_ratio(double d);

/// Uniform azimuth in [0, 2 pi) and elevation in the body frame's
/// +-elevation_half_fov band (uniform over the band's solid angle).
LidarScan sample_scan(const WorldModel& world, const PlantState& pose, double stamp,
                      std::mt19937_64& rng, const LidarConfig& cfg);

/// Single ray with the sensor's noise and dropout model; exposed for tests.
LidarPoint sample_ray(const WorldModel& world, const Vec3& origin, const Vec3& dir, double stamp,
                      std::mt19937_64& rng, const LidarConfig& cfg);

}  // namespace canopy::sim
