#include "canopy/sim/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace canopy::sim {

double near_blind_ratio(double d) {
  if (d >= 1.0) return 0.0;
  return std::clamp(0.8 - 0.7 * (d - 0.1) / 0.9, 0.0, 0.8);
}

LidarPoint sample_ray(const WorldModel& world, const Vec3& origin, const Vec3& dir, double stamp,
                      std::mt19937_64& rng, const LidarConfig& cfg) {
  LidarPoint pt;
  pt.direction = dir;
  const auto hit = world.raycast(origin, dir, cfg.max_range, stamp);
  if (!hit) return pt;
  const double d = *hit;
  if (cfg.near_blind && d < 1.0) {
    std::bernoulli_distribution drop(near_blind_ratio(d));
    if (drop(rng)) return pt;
  }
  double noise = 0.0;
  if (cfg.range_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, cfg.range_sigma);
    do {
      noise = n(rng);
    } while (std::abs(noise) > 4.0 * cfg.range_sigma);
  }
  const double r = std::clamp(d + noise, std::min(d, 1e-6), cfg.max_range);
  if (!(r > 0.0)) return pt;
  pt.range = r;
  return pt;
}

LidarScan sample_scan(const WorldModel& world, const PlantState& pose, double stamp,
                      std::mt19937_64& rng, const LidarConfig& cfg) {
  LidarScan scan;
  scan.stamp = stamp;
  scan.origin = pose.p + pose.attitude * cfg.mount_offset;
  scan.points.reserve(static_cast<std::size_t>(std::max(0, cfg.points_per_scan)));
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
  const double s = std::sin(cfg.elevation_half_fov);
  std::uniform_real_distribution<double> sin_elev(-s, s);
  for (int i = 0; i < cfg.points_per_scan; ++i) {
    const double az = azimuth(rng);
    const double se = sin_elev(rng);
    const double ce = std::sqrt(1.0 - se * se);
    const Vec3 body(ce * std::cos(az), ce * std::sin(az), se);
    const Vec3 dir = (pose.attitude * body).normalized();
    scan.points.push_back(sample_ray(world, scan.origin, dir, stamp, rng, cfg));
  }
  return scan;
}

}  // namespace canopy::sim
