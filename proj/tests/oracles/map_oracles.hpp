#pragma once

// Brute-force reference implementations for the map and planner. They share
// no code with the library beyond the read-only grid accessors, and are
// deliberately naive.

#include <algorithm>
#include <compare>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "canopy/map/inflated_grid.hpp"
#include "canopy/map/probability_grid.hpp"

namespace oracle {

using canopy::Index3;
using canopy::Vec3;
using canopy::map::CellState;

/// Probability-space posterior with map prior 0.5, applied directly.
inline double bayes_posterior(double prior, double measurement) {
  const double num = measurement * prior;
  return num / (num + (1.0 - measurement) * (1.0 - prior));
}

/// Probability and its complement carried separately, so long runs near 0 or 1
/// do not lose precision to 1 - p cancellation.
struct Belief {
  double p = 0.5;
  double q = 0.5;
};

/// The same posterior as bayes_posterior on a Belief.
inline Belief bayes_step(const Belief& b, double measurement) {
  const double yes = measurement * b.p, no = (1.0 - measurement) * b.q;
  return {yes / (yes + no), no / (yes + no)};
}

/// {d in Z^3 : |d| * res < r} by enumeration over a generous cube, plus 0.
inline std::vector<Index3> enumerate_offsets(double r, double res, bool planar) {
  std::vector<Index3> out;
  const int n = static_cast<int>(r / res) + 2;
  for (int x = -n; x <= n; ++x) {
    for (int y = -n; y <= n; ++y) {
      for (int z = planar ? 0 : -n; z <= (planar ? 0 : n); ++z) {
        const double len = std::sqrt(double(x * x + y * y + z * z)) * res;
        if (len < r || (x == 0 && y == 0 && z == 0)) out.emplace_back(x, y, z);
      }
    }
  }
  return out;
}

struct Key {
  int x, y, z;
  auto operator<=>(const Key&) const = default;
};
inline Key key(const Index3& g) { return {g.x(), g.y(), g.z()}; }

/// Window cells in x-major order.
template <class F>
void for_each_cell(const Index3& lo, const Index3& dims, F&& f) {
  for (int x = 0; x < dims.x(); ++x)
    for (int y = 0; y < dims.y(); ++y)
      for (int z = 0; z < dims.z(); ++z) f(Index3(lo.x() + x, lo.y() + y, lo.z() + z));
}

struct BatchCounts {
  std::vector<int> n_occ, n_unk, n_f;  // window cells in for_each_cell order
};

/// Counters recomputed from cell states alone. Cells outside the window are
/// Unknown.
inline BatchCounts batch_counts(const canopy::map::ProbabilityGrid& grid,
                                const std::vector<Index3>& off_occ,
                                const std::vector<Index3>& off_unk) {
  const auto& w = grid.window();
  BatchCounts b;
  for_each_cell(w.origin(), w.dims(), [&](const Index3& t) {
    int occ = 0, unk = 0, nf = 0;
    for (const auto& o : off_occ) occ += grid.state(t - o) == CellState::Occupied;
    for (const auto& o : off_unk) unk += grid.state(t - o) == CellState::Unknown;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz)
          nf += grid.state(t + Index3(dx, dy, dz)) == CellState::KnownFree;
    b.n_occ.push_back(occ);
    b.n_unk.push_back(unk);
    b.n_f.push_back(nf);
  });
  return b;
}

/// Closed segment [a, b] against the closed cube of `cell` (slab test).
inline bool segment_touches_cell(const Vec3& a, const Vec3& b, const Index3& cell, double res,
                                 double* t_enter = nullptr) {
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double lo = cell[i] * res, hi = (cell[i] + 1) * res;
    const double d = b[i] - a[i];
    if (d == 0.0) {
      if (a[i] < lo || a[i] > hi) return false;
      continue;
    }
    double ta = (lo - a[i]) / d, tb = (hi - a[i]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  if (t_enter) *t_enter = t0;
  return true;
}

/// Cells whose interior the open segment (a, b) passes through, ordered by
/// entry parameter. Grazing contacts (zero-length overlap) are excluded.
inline std::vector<Index3> cells_on_segment(const Vec3& a, const Vec3& b, double res) {
  const Vec3 lo = a.cwiseMin(b) / res, hi = a.cwiseMax(b) / res;
  std::vector<std::pair<double, Index3>> hits;
  for (int x = int(std::floor(lo.x())) - 1; x <= int(std::floor(hi.x())) + 1; ++x)
    for (int y = int(std::floor(lo.y())) - 1; y <= int(std::floor(hi.y())) + 1; ++y)
      for (int z = int(std::floor(lo.z())) - 1; z <= int(std::floor(hi.z())) + 1; ++z) {
        const Index3 c(x, y, z);
        double t0 = 0.0, t1 = 1.0;
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
          const double clo = c[i] * res, chi = (c[i] + 1) * res;
          const double d = b[i] - a[i];
          if (d == 0.0) {
            ok = a[i] >= clo && a[i] < chi;
            continue;
          }
          double ta = (clo - a[i]) / d, tb = (chi - a[i]) / d;
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        }
        // Positive-length overlap, or the cell holding a point endpoint.
        if (ok && (t1 - t0 > 1e-12 || (a == b && t0 <= t1))) hits.emplace_back(t0, c);
      }
  std::sort(hits.begin(), hits.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  std::vector<Index3> out;
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

/// True if [origin, origin + range * dir] touches any Occupied cell of the window.
inline bool ray_blocked_brute_force(const canopy::map::ProbabilityGrid& grid, const Vec3& origin,
                                    const Vec3& dir, double range) {
  const auto& w = grid.window();
  const Vec3 end = origin + dir * range;
  bool blocked = false;
  for_each_cell(w.origin(), w.dims(), [&](const Index3& c) {
    if (blocked || grid.state(c) != CellState::Occupied) return;
    blocked = segment_touches_cell(origin, end, c, w.resolution());
  });
  return blocked;
}

/// Breadth-first distance from `start` to the nearest No-Inflation cell over
/// 6-neighbors, restricted to window cells within `beta` of the start center.
/// -1 if none. Layer-by-layer with ordered sets, unlike the library's queue.
inline int escape_distance(const canopy::map::InflatedGrid& grid, const Index3& start, double beta) {
  const double lim = (beta / grid.window().resolution()) * (beta / grid.window().resolution());
  if (grid.is_free(start)) return 0;
  if (!grid.window().contains(start)) return -1;
  std::set<Key> seen{key(start)};
  std::vector<Index3> layer{start};
  for (int dist = 1; !layer.empty(); ++dist) {
    std::vector<Index3> next;
    for (const auto& c : layer) {
      for (int a = 0; a < 3; ++a) {
        for (int s : {-1, 1}) {
          Index3 n = c;
          n[a] += s;
          if ((n - start).squaredNorm() > lim || !grid.window().contains(n)) continue;
          if (!seen.insert(key(n)).second) continue;
          if (grid.is_free(n)) return dist;
          next.push_back(n);
        }
      }
    }
    layer = std::move(next);
  }
  return -1;
}

}  // namespace oracle
