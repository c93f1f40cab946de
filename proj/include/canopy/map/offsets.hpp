#pragma once

#include <vector>

#include "canopy/common/geometry.hpp"

namespace canopy::map {

/// Integer cell offsets whose Euclidean length satisfies |d| * resolution < radius,
/// plus the zero offset. The strict inequality gives 9 offsets in 2-D for
/// r = 0.2 m at 0.1 m (a <= rule would give 13). With `planar` the z
/// component is always zero.
std::vector<Index3> precompute_offsets(double radius, double resolution, bool planar = false);

/// Largest |component| over the offset set.
int offset_reach(const std::vector<Index3>& offsets);

}  // namespace canopy::map
