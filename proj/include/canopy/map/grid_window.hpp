#pragma once

#include <cstddef>

#include "canopy/common/geometry.hpp"
#include "canopy/map/raycast.hpp"

namespace canopy::map {

/// Half-open integer box [lo, hi).
struct IndexBox {
  Index3 lo = Index3::Zero();
  Index3 hi = Index3::Zero();

  bool empty() const { return (hi.array() <= lo.array()).any(); }
  bool contains(const Index3& g) const {
    return (g.array() >= lo.array()).all() && (g.array() < hi.array()).all();
  }
  IndexBox intersect(const IndexBox& o) const {
    return {lo.cwiseMax(o.lo), hi.cwiseMin(o.hi)};
  }
  IndexBox expanded(int r) const { return {lo.array() - r, hi.array() + r}; }
};

/// Calls f(cell) for every cell of `outer` that is not in `inner`.
template <class F>
void for_each_in_box_minus(const IndexBox& outer, const IndexBox& inner, F&& f) {
  if (outer.empty()) return;
  for (int x = outer.lo.x(); x < outer.hi.x(); ++x) {
    const bool x_in = x >= inner.lo.x() && x < inner.hi.x();
    for (int y = outer.lo.y(); y < outer.hi.y(); ++y) {
      const bool y_in = x_in && y >= inner.lo.y() && y < inner.hi.y();
      for (int z = outer.lo.z(); z < outer.hi.z(); ++z) {
        if (y_in && z >= inner.lo.z() && z < inner.hi.z()) {
          z = inner.hi.z() - 1;
          continue;
        }
        f(Index3(x, y, z));
      }
    }
  }
}

template <class F>
void for_each_in_box(const IndexBox& box, F&& f) {
  for_each_in_box_minus(box, IndexBox{}, f);
}

/// Sliding window over the global cell lattice. Storage is ring-indexed: a
/// global cell g lives at slot (g mod dims), so moving the window never
/// moves data that stays inside it.
class GridWindow {
 public:
  GridWindow() = default;
  GridWindow(const Index3& dims, double resolution, const Index3& origin)
      : dims_(dims), resolution_(resolution) {
    set_origin(origin);
  }

  const Index3& dims() const { return dims_; }
  const Index3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  }

  void set_origin(const Index3& origin) {
    origin_ = origin;
    for (int i = 0; i < 3; ++i) origin_slot_[i] = ((origin[i] % dims_[i]) + dims_[i]) % dims_[i];
  }

  IndexBox bounds() const { return {origin_, origin_ + dims_}; }
  bool contains(const Index3& g) const { return bounds().contains(g); }

  /// Requires contains(g).
  std::size_t slot(const Index3& g) const {
    int w[3];
    for (int i = 0; i < 3; ++i) {
      w[i] = g[i] - origin_[i] + origin_slot_[i];
      if (w[i] >= dims_[i]) w[i] -= dims_[i];
    }
    return (static_cast<std::size_t>(w[0]) * dims_.y() + w[1]) * dims_.z() + w[2];
  }

  Index3 cell_of(const Vec3& p) const { return world_to_cell(p, resolution_); }
  Vec3 center_of(const Index3& g) const { return cell_center(g, resolution_); }

  /// World-frame extent of the window.
  Aabb box() const {
    return {origin_.cast<double>() * resolution_, (origin_ + dims_).cast<double>() * resolution_};
  }
  Vec3 center() const { return box().center(); }

  /// Origin of a window of the same size centered on `p`.
  Index3 origin_for_center(const Vec3& p) const { return cell_of(p) - dims_ / 2; }

 private:
  Index3 dims_ = Index3::Ones();
  double resolution_ = 0.1;
  Index3 origin_ = Index3::Zero();
  Index3 origin_slot_ = Index3::Zero();  // origin_ mod dims_
};

}  // namespace canopy::map
