#include "canopy/mpc/reference_sampler.hpp"

#include <algorithm>

namespace canopy::mpc {

namespace {

struct PolylinePoint {
  std::size_t segment;
  double s;  // arc length from the start
};

}  // namespace

std::vector<Vec3> sample_references(const std::vector<Vec3>& polyline, std::size_t free_begin,
                                    const Vec3& p_odom, double spacing, int horizon,
                                    const planner::Polytope* sfc) {
  std::vector<Vec3> refs;
  if (horizon <= 0) return refs;
  if (polyline.empty()) return std::vector<Vec3>(static_cast<std::size_t>(horizon), p_odom);

  // Cumulative arc length.
  std::vector<double> cum(polyline.size(), 0.0);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    cum[i] = cum[i - 1] + (polyline[i] - polyline[i - 1]).norm();
  }
  const double total = cum.back();
  const double free_s = cum[std::min(free_begin, polyline.size() - 1)];

  // Projection of p_odom.
  double s0 = 0.0;
  double best = (polyline.front() - p_odom).squaredNorm();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Vec3 ab = polyline[i + 1] - polyline[i];
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p_odom - polyline[i]).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const double d2 = (polyline[i] + t * ab - p_odom).squaredNorm();
    if (d2 < best) {
      best = d2;
      s0 = cum[i] + t * std::sqrt(len2);
    }
  }

  const auto point_at = [&](double s) {
    if (s >= total) return polyline.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - cum.begin()) - 1;
    const double len = cum[i + 1] - cum[i];
    const double t = len > 0.0 ? (s - cum[i]) / len : 0.0;
    return Vec3(polyline[i] + t * (polyline[i + 1] - polyline[i]));
  };

  refs.push_back(point_at(s0));
  double s = s0;
  bool stopped = false;
  while (static_cast<int>(refs.size()) < horizon) {
    if (!stopped) {
      const double next = s + spacing;
      if (s >= total || spacing <= 0.0) {
        stopped = true;
      } else {
        const double clamped = std::min(next, total);
        const Vec3 p = point_at(clamped);
        if (sfc && clamped >= free_s && !sfc->contains(p, 1e-9)) {
          stopped = true;
        } else {
          s = clamped;
          refs.push_back(p);
          continue;
        }
      }
    }
    refs.push_back(refs.back());
  }
  return refs;
}

std::vector<Vec3> sample_references(const planner::ReferencePath& path, const Vec3& p_odom,
                                    double v_ref, double dt, int horizon,
                                    const planner::Polytope* sfc) {
  return sample_references(path.polyline(), path.free_begin(), p_odom, v_ref * dt, horizon, sfc);
}

}  // namespace canopy::mpc
