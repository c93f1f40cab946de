#include "canopy/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace canopy::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double box_distance(const Aabb& b, const Vec3& p) {
  const Vec3 q = (p - b.max).cwiseMax(b.min - p).cwiseMax(0.0);
  return q.norm();
}

double capsule_distance(const Capsule& c, const Vec3& p) {
  const Vec3 ab = c.b - c.a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - c.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return std::max(0.0, (p - (c.a + t * ab)).norm() - c.radius);
}

std::optional<double> box_intersect(const Aabb& b, const Vec3& o, const Vec3& d, double max_range) {
  double t0 = 0.0, t1 = max_range;
  for (int i = 0; i < 3; ++i) {
    if (d(i) == 0.0) {
      if (o(i) < b.min(i) || o(i) > b.max(i)) return std::nullopt;
      continue;
    }
    double ta = (b.min(i) - o(i)) / d(i);
    double tb = (b.max(i) - o(i)) / d(i);
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

std::optional<double> sphere_intersect(const Vec3& c, double r, const Vec3& o, const Vec3& d,
                                       double max_range) {
  const Vec3 oc = o - c;
  const double b = oc.dot(d);
  const double cc = oc.squaredNorm() - r * r;
  if (cc <= 0.0) return 0.0;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0 || t > max_range) return std::nullopt;
  return t;
}

std::optional<double> capsule_intersect(const Capsule& c, const Vec3& o, const Vec3& d,
                                        double max_range) {
  if (capsule_distance(c, o) <= 0.0) return 0.0;
  const Vec3 ba = c.b - c.a;
  const Vec3 oa = o - c.a;
  const double baba = ba.dot(ba);
  std::optional<double> best;
  if (baba > 0.0) {
    // Infinite cylinder restricted to the segment's slab.
    const double bard = ba.dot(d);
    const double baoa = ba.dot(oa);
    const double rdoa = d.dot(oa);
    const double oaoa = oa.dot(oa);
    const double a = baba - bard * bard;
    const double b = baba * rdoa - baoa * bard;
    const double cq = baba * oaoa - baoa * baoa - c.radius * c.radius * baba;
    const double h = b * b - a * cq;
    if (a > 0.0 && h >= 0.0) {
      const double t = (-b - std::sqrt(h)) / a;
      const double y = baoa + t * bard;
      if (t >= 0.0 && t <= max_range && y > 0.0 && y < baba) best = t;
    }
  }
  for (const Vec3& cap : {c.a, c.b}) {
    const auto t = sphere_intersect(cap, c.radius, o, d, max_range);
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

std::optional<double> heightfield_intersect(const Heightfield& hf, const Vec3& o, const Vec3& d,
                                            double max_range) {
  const auto f = [&](double s) {
    const Vec3 p = o + s * d;
    return p.z() - hf.height(p.x(), p.y());
  };
  double s = 0.0;
  double fs = f(s);
  if (fs <= 0.0) return 0.0;
  // f decreases along the ray at most at `rate`, so stepping by f / rate
  // never crosses the surface. Exact in one step on flat ground.
  const double rate = std::max(0.0, -d.z()) + hf.max_slope() * std::hypot(d.x(), d.y());
  if (rate <= 0.0) return std::nullopt;
  for (int i = 0; i < 10000; ++i) {
    const double step = fs / rate;
    s += step;
    if (s > max_range) return std::nullopt;
    fs = f(s);
    if (fs <= 1e-9 || step < 1e-9) return s;
  }
  return s;
}

}  // namespace

std::vector<Capsule> Net::wires() const {
  std::vector<Capsule> out;
  const double lu = u.norm();
  const double lv = v.norm();
  if (!(spacing > 0.0)) return out;
  const int nu = static_cast<int>(std::floor(lu / spacing + 1e-9));
  const int nv = static_cast<int>(std::floor(lv / spacing + 1e-9));
  const Vec3 eu = lu > 0.0 ? Vec3(u / lu) : Vec3::Zero();
  const Vec3 ev = lv > 0.0 ? Vec3(v / lv) : Vec3::Zero();
  for (int i = 0; i <= nv; ++i) {
    const Vec3 a = corner + ev * (i * spacing);
    out.push_back({a, a + u, wire_radius});
  }
  for (int i = 0; i <= nu; ++i) {
    const Vec3 a = corner + eu * (i * spacing);
    out.push_back({a, a + v, wire_radius});
  }
  return out;
}

double Heightfield::height(double x, double y) const {
  double h = base;
  for (const Wave& w : waves) {
    h += w.amplitude * std::sin(w.kx * x + w.phase_x) * std::cos(w.ky * y + w.phase_y);
  }
  return h;
}

double Heightfield::max_slope() const {
  double s = 0.0;
  for (const Wave& w : waves) s += std::abs(w.amplitude) * std::hypot(w.kx, w.ky);
  return s;
}

void WorldSpec::validate() const {
  const auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("world: ") + what);
  };
  if (!((bounds.max.array() > bounds.min.array()).all())) fail("bounds must be non-degenerate");
  if (branch_density < 0.0) fail("branch_density must be >= 0");
  if (terrain_amplitude < 0.0) fail("terrain_amplitude must be >= 0");
  if (!(terrain_wavelength > 0.0)) fail("terrain_wavelength must be > 0");
  if (branch_radius_min < 0.0 || branch_radius_max < branch_radius_min) {
    fail("branch radius range must satisfy 0 <= min <= max");
  }
  if (branch_length_min < 0.0 || branch_length_max < branch_length_min) {
    fail("branch length range must satisfy 0 <= min <= max");
  }
  for (const Box& b : boxes) {
    if (!((b.box.max.array() >= b.box.min.array()).all())) fail("box has negative extent");
  }
  for (const Capsule& c : capsules) {
    if (c.radius < 0.0) fail("capsule radius must be >= 0");
  }
  for (const Net& n : nets) {
    if (n.wire_radius < 0.0 || !(n.spacing > 0.0)) fail("net needs wire_radius >= 0, spacing > 0");
  }
  for (const Sphere& s : spheres) {
    if (s.radius < 0.0) fail("sphere radius must be >= 0");
  }
}

WorldModel generate_world(const WorldSpec& spec, std::uint64_t seed) {
  spec.validate();
  WorldModel w;
  w.bounds = spec.bounds;
  w.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  if (spec.ground) {
    Heightfield hf;
    hf.base = spec.ground_base;
    if (spec.terrain_amplitude > 0.0) {
      const double k = 2.0 * std::numbers::pi / spec.terrain_wavelength;
      for (int i = 0; i < 3; ++i) {
        Heightfield::Wave wave;
        wave.amplitude = spec.terrain_amplitude / 3.0;
        wave.kx = k * uniform(0.5, 1.5);
        wave.ky = k * uniform(0.5, 1.5);
        wave.phase_x = uniform(0.0, 2.0 * std::numbers::pi);
        wave.phase_y = uniform(0.0, 2.0 * std::numbers::pi);
        hf.waves.push_back(wave);
      }
    }
    w.primitives.emplace_back(hf);
  }
  for (const Box& b : spec.boxes) w.primitives.emplace_back(b);
  for (const Capsule& c : spec.capsules) w.primitives.emplace_back(c);
  for (const Net& n : spec.nets) w.primitives.emplace_back(n);
  for (const Sphere& s : spec.spheres) w.primitives.emplace_back(s);

  const Vec3 ext = spec.bounds.extent();
  const auto count = static_cast<std::size_t>(std::llround(spec.branch_density * ext.x() * ext.y()));
  for (std::size_t i = 0; i < count; ++i) {
    Capsule c;
    c.radius = uniform(spec.branch_radius_min, spec.branch_radius_max);
    const Vec3 lo = spec.bounds.min + Vec3::Constant(c.radius);
    const Vec3 hi = spec.bounds.max - Vec3::Constant(c.radius);
    const Vec3 base(uniform(lo.x(), hi.x()), uniform(lo.y(), hi.y()), uniform(lo.z(), hi.z()));
    const double azimuth = uniform(0.0, 2.0 * std::numbers::pi);
    const double cos_polar = uniform(-1.0, 1.0);
    const double sin_polar = std::sqrt(1.0 - cos_polar * cos_polar);
    const Vec3 dir(sin_polar * std::cos(azimuth), sin_polar * std::sin(azimuth), cos_polar);
    const double length = uniform(spec.branch_length_min, spec.branch_length_max);
    c.a = base;
    c.b = (base + length * dir).cwiseMax(lo).cwiseMin(hi);
    w.primitives.emplace_back(c);
  }
  return w;
}

double distance_to(const Primitive& prim, const Vec3& p, double t) {
  return std::visit(
      Overloaded{
          [&](const Box& b) { return box_distance(b.box, p); },
          [&](const Capsule& c) { return capsule_distance(c, p); },
          [&](const Net& n) {
            double best = kInf;
            for (const Capsule& c : n.wires()) best = std::min(best, capsule_distance(c, p));
            return best;
          },
          [&](const Heightfield& hf) {
            const double dz = p.z() - hf.height(p.x(), p.y());
            if (dz <= 0.0) return 0.0;
            const double slope = hf.max_slope();
            return dz / std::sqrt(1.0 + slope * slope);
          },
          [&](const Sphere& s) {
            return std::max(0.0, (p - s.center_at(t)).norm() - s.radius);
          },
      },
      prim);
}

std::optional<double> intersect(const Primitive& prim, const Vec3& origin, const Vec3& dir,
                                double max_range, double t) {
  return std::visit(
      Overloaded{
          [&](const Box& b) { return box_intersect(b.box, origin, dir, max_range); },
          [&](const Capsule& c) { return capsule_intersect(c, origin, dir, max_range); },
          [&](const Net& n) {
            std::optional<double> best;
            for (const Capsule& c : n.wires()) {
              const auto h = capsule_intersect(c, origin, dir, max_range);
              if (h && (!best || *h < *best)) best = h;
            }
            return best;
          },
          [&](const Heightfield& hf) { return heightfield_intersect(hf, origin, dir, max_range); },
          [&](const Sphere& s) {
            return sphere_intersect(s.center_at(t), s.radius, origin, dir, max_range);
          },
      },
      prim);
}

double WorldModel::distance(const Vec3& p, double t) const {
  double best = kInf;
  for (const Primitive& prim : primitives) best = std::min(best, distance_to(prim, p, t));
  return best;
}

std::optional<double> WorldModel::raycast(const Vec3& origin, const Vec3& dir, double max_range,
                                          double t) const {
  std::optional<double> best;
  for (const Primitive& prim : primitives) {
    const auto h = intersect(prim, origin, dir, best ? *best : max_range, t);
    if (h && (!best || *h < *best)) best = h;
  }
  return best;
}

std::size_t WorldModel::count_capsules() const {
  std::size_t n = 0;
  for (const Primitive& prim : primitives) n += std::holds_alternative<Capsule>(prim) ? 1 : 0;
  return n;
}

}  // namespace canopy::sim
