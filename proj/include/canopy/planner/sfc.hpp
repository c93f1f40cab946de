#pragma once

#include <optional>
#include <vector>

#include "canopy/map/probability_grid.hpp"
#include "canopy/planner/polytope.hpp"

namespace canopy::planner {

struct SfcConfig {
  double robot_radius = 0.211;  // r_q
  int max_planes = 60;          // obstacle-derived halfplanes
  double exclusion_eps = 1e-6;  // obstacle points sit this far outside their plane
};

struct Corridor {
  Vec3 seed = Vec3::Zero();
  Polytope pre_shrink;  // excludes every obstacle point, clipped to the window
  Polytope polytope;    // pre_shrink reduced by robot_radius + half cell diagonal
  int obstacle_points = 0;
  bool used_box_fallback = false;
};

/// Occupied and frontier cell centers inside the window, in window scan order.
std::vector<Vec3> collect_sfc_obstacles(const map::ProbabilityGrid& grid);

/// Single-polytope corridor around `seed` by greedy sphere dilation: the
/// nearest obstacle point not yet excluded contributes the halfplane tangent
/// to the sphere through it, until every point is excluded. If the plane
/// budget runs out, an axis-aligned cube around the seed excludes the rest.
/// Returns nullopt (NoCorridor) if the seed cell is not Known Free or the
/// shrunk polytope no longer contains the seed.
std::optional<Corridor> generate_sfc(const map::ProbabilityGrid& grid, const Vec3& seed,
                                     const SfcConfig& cfg = {});

/// Same, on a precomputed obstacle list.
std::optional<Corridor> generate_sfc(const map::ProbabilityGrid& grid, const Vec3& seed,
                                     const std::vector<Vec3>& obstacles, const SfcConfig& cfg);

/// Closest point to `p` on the polyline.
Vec3 closest_point_on_polyline(const std::vector<Vec3>& poly, const Vec3& p);

}  // namespace canopy::planner
