#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "canopy/common/geometry.hpp"

namespace canopy::sim {

struct Box {
  Aabb box;
};

/// Segment [a, b] swept by a sphere of `radius`; models branches and trunks.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.05;
};

/// Rectangle corner + u * [0,1] + v * [0,1] (u, v orthogonal) carrying a
/// grid of wires of `wire_radius` every `spacing` meters along both edges.
struct Net {
  Vec3 corner = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitZ();
  double wire_radius = 0.005;
  double spacing = 0.1;

  std::vector<Capsule> wires() const;
};

/// Terrain z = base + sum_k amplitude_k sin(kx_k x + phx_k) cos(ky_k y + phy_k)
/// over the world's xy extent. Zero amplitudes give flat ground.
struct Heightfield {
  struct Wave {
    double amplitude = 0.0;
    double kx = 0.0, ky = 0.0;
    double phase_x = 0.0, phase_y = 0.0;
  };
  double base = 0.0;
  std::vector<Wave> waves;

  double height(double x, double y) const;
  /// Upper bound of |grad h|.
  double max_slope() const;
};

/// Sphere moving at constant velocity: center(t) = center + velocity * t.
struct Sphere {
  Vec3 center = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double radius = 0.3;

  Vec3 center_at(double t) const { return center + velocity * t; }
};

using Primitive = std::variant<Box, Capsule, Net, Heightfield, Sphere>;

/// Scene parameters. Branches are placed uniformly in `bounds`, with count
/// round(branch_density * xy area of bounds).
struct WorldSpec {
  Aabb bounds{Vec3(-20, -20, -1), Vec3(20, 20, 10)};
  bool ground = true;
  double ground_base = 0.0;
  double terrain_amplitude = 0.0;   // meters; 0 = flat
  double terrain_wavelength = 8.0;  // meters

  double branch_density = 0.0;  // per m^2
  double branch_radius_min = 0.02;
  double branch_radius_max = 0.08;
  double branch_length_min = 0.5;
  double branch_length_max = 2.0;

  std::vector<Box> boxes;
  std::vector<Capsule> capsules;
  std::vector<Net> nets;
  std::vector<Sphere> spheres;

  /// Throws std::invalid_argument on negative dimensions or degenerate bounds.
  void validate() const;
};

struct WorldModel {
  std::vector<Primitive> primitives;
  Aabb bounds;
  std::uint64_t seed = 0;

  /// Distance from `p` to the nearest primitive surface at time `t`
  /// (0 inside a solid); +inf for an empty world.
  double distance(const Vec3& p, double t = 0.0) const;
  /// Nearest intersection distance along unit `dir` within `max_range`.
  std::optional<double> raycast(const Vec3& origin, const Vec3& dir, double max_range,
                                double t = 0.0) const;
  std::size_t count_capsules() const;
};

WorldModel generate_world(const WorldSpec& spec, std::uint64_t seed);

double distance_to(const Primitive& prim, const Vec3& p, double t);
std::optional<double> intersect(const Primitive& prim, const Vec3& origin, const Vec3& dir,
                                double max_range, double t);

}  // namespace canopy::sim
