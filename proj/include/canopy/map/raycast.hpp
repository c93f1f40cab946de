#pragma once

#include <cmath>
#include <limits>

#include "canopy/common/geometry.hpp"

namespace canopy::map {

inline Index3 world_to_cell(const Vec3& p, double resolution) {
  return Index3(static_cast<int>(std::floor(p.x() / resolution)),
                static_cast<int>(std::floor(p.y() / resolution)),
                static_cast<int>(std::floor(p.z() / resolution)));
}

inline Vec3 cell_center(const Index3& c, double resolution) {
  return (c.cast<double>().array() + 0.5).matrix() * resolution;
}

/// Face-connected voxel traversal (Amanatides & Woo) of the segment
/// [from, to]. `visit(cell)` is called for each cell in order, starting with
/// the cell containing `from`; returning false stops the walk. The last cell
/// visited is the one containing `to` unless the walk was stopped.
template <class Visit>
void traverse_segment(const Vec3& from, const Vec3& to, double resolution, Visit&& visit) {
  Index3 cell = world_to_cell(from, resolution);
  const Index3 last = world_to_cell(to, resolution);
  const Vec3 delta = to - from;

  Index3 step;
  Vec3 t_max, t_delta;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (delta[i] > 0.0) {
      step[i] = 1;
      t_delta[i] = resolution / delta[i];
      t_max[i] = ((cell[i] + 1) * resolution - from[i]) / delta[i];
    } else if (delta[i] < 0.0) {
      step[i] = -1;
      t_delta[i] = -resolution / delta[i];
      t_max[i] = (cell[i] * resolution - from[i]) / delta[i];
    } else {
      step[i] = 0;
      t_delta[i] = kInf;
      t_max[i] = kInf;
    }
  }

  // Each step moves one face; the Manhattan distance bounds the walk even
  // when rounding puts the final crossing a hair past t = 1.
  const int max_steps = (last - cell).cwiseAbs().sum();
  for (int n = 0;; ++n) {
    if (!visit(static_cast<const Index3&>(cell))) return;
    if (n >= max_steps || cell == last) return;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) return;
    cell[axis] += step[axis];
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace canopy::map
