#pragma once

#include <optional>
#include <vector>

#include "canopy/common/geometry.hpp"

namespace canopy {

/// One LiDAR return. Invalid returns carry a direction but no range.
struct LidarPoint {
  Vec3 direction = Vec3::UnitX();  // unit, world frame
  std::optional<double> range;     // meters; empty for invalid returns

  bool valid() const { return range.has_value(); }
  Vec3 endpoint(const Vec3& origin) const { return origin + direction * range.value_or(0.0); }
};

struct LidarScan {
  double stamp = 0.0;
  Vec3 origin = Vec3::Zero();
  std::vector<LidarPoint> points;
};

/// State estimate consumed by planning and control. `a` is the world-frame
/// acceleration with gravity removed (zero at hover).
struct Odometry {
  double stamp = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  double yaw = 0.0;
};

}  // namespace canopy
