#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace canopy {

using Vec3 = Eigen::Vector3d;
using Index3 = Eigen::Vector3i;

/// Axis-aligned box [min, max] in meters.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= std::numbers::pi;
  // fmod maps +pi to -pi; the interval is open at -pi.
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace canopy
