#include "canopy/planner/sfc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace canopy::planner {

std::vector<Vec3> collect_sfc_obstacles(const map::ProbabilityGrid& grid) {
  std::vector<Vec3> out;
  const auto& w = grid.window();
  map::for_each_in_box(w.bounds(), [&](const Index3& g) {
    if (grid.state(g) == map::CellState::Occupied || grid.is_frontier(g)) {
      out.push_back(w.center_of(g));
    }
  });
  return out;
}

std::optional<Corridor> generate_sfc(const map::ProbabilityGrid& grid, const Vec3& seed,
                                     const SfcConfig& cfg) {
  return generate_sfc(grid, seed, collect_sfc_obstacles(grid), cfg);
}

std::optional<Corridor> generate_sfc(const map::ProbabilityGrid& grid, const Vec3& seed,
                                     const std::vector<Vec3>& obstacles, const SfcConfig& cfg) {
  const auto& w = grid.window();
  if (grid.state(w.cell_of(seed)) != map::CellState::KnownFree) return std::nullopt;

  Corridor out;
  out.seed = seed;
  out.obstacle_points = static_cast<int>(obstacles.size());

  std::vector<std::size_t> order(obstacles.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist2(obstacles.size());
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    dist2[i] = (obstacles[i] - seed).squaredNorm();
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist2[a] < dist2[b]; });

  // Six planes are held back for the cube fallback.
  const int budget = std::max(cfg.max_planes - 6, 0);
  Polytope& poly = out.pre_shrink;
  std::vector<std::size_t> leftover;
  for (std::size_t i : order) {
    const Vec3& o = obstacles[i];
    if (!poly.empty() && (poly.C * o - poly.d).maxCoeff() > 0.0) continue;
    if (poly.size() >= budget) {
      leftover.push_back(i);
      continue;
    }
    const Vec3 n = (o - seed).normalized();
    poly.add(n, n.dot(o) - cfg.exclusion_eps);
  }

  if (!leftover.empty()) {
    double half = std::numeric_limits<double>::infinity();
    for (std::size_t i : leftover) {
      half = std::min(half, (obstacles[i] - seed).cwiseAbs().maxCoeff());
    }
    half -= cfg.exclusion_eps;
    for (int a = 0; a < 3; ++a) {
      const Vec3 e = Vec3::Unit(a);
      poly.add(e, seed[a] + half);
      poly.add(-e, -(seed[a] - half));
    }
    out.used_box_fallback = true;
  }

  const Aabb box = w.box();
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = Vec3::Unit(a);
    poly.add(e, box.max[a]);
    poly.add(-e, -box.min[a]);
  }

  const double half_diagonal = 0.5 * std::sqrt(3.0) * w.resolution();
  out.polytope = poly.shrunk(cfg.robot_radius + half_diagonal);
  if (!out.polytope.contains(seed, 0.0)) return std::nullopt;
  return out;
}

Vec3 closest_point_on_polyline(const std::vector<Vec3>& poly, const Vec3& p) {
  if (poly.empty()) return p;
  Vec3 best = poly.front();
  double best_d2 = (best - p).squaredNorm();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const Vec3 a = poly[i];
    const Vec3 ab = poly[i + 1] - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec3 q = a + t * ab;
    const double d2 = (q - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = q;
    }
  }
  return best;
}

}  // namespace canopy::planner
