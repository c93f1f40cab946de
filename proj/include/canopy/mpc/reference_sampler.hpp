#pragma once

#include <vector>

#include "canopy/planner/polytope.hpp"
#include "canopy/planner/reference_path.hpp"

namespace canopy::mpc {

/// N references along `polyline`: the first is the closest point to
/// `p_odom`, the rest are spaced spacing = v_ref * dt in arc length. Sampling
/// stops at the path end, or at the first sample at index >= `free_begin`'s
/// arc position that falls outside `sfc`; the remaining entries repeat the
/// last accepted sample. Samples on the escape part are not checked against
/// the corridor (it does not cover them). `sfc` may be null.
std::vector<Vec3> sample_references(const std::vector<Vec3>& polyline, std::size_t free_begin,
                                    const Vec3& p_odom, double spacing, int horizon,
                                    const planner::Polytope* sfc);

std::vector<Vec3> sample_references(const planner::ReferencePath& path, const Vec3& p_odom,
                                    double v_ref, double dt, int horizon,
                                    const planner::Polytope* sfc);

}  // namespace canopy::mpc
