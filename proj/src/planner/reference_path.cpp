#include "canopy/planner/reference_path.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <unordered_map>

#include "canopy/map/raycast.hpp"

namespace canopy::planner {

namespace {

constexpr std::array<std::array<int, 3>, 6> kFaceNeighbors{{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

// Dense local index for the BFS ball.
struct LocalFrame {
  Index3 lo;
  Index3 size;
  std::size_t index(const Index3& g) const {
    const Index3 l = g - lo;
    return (static_cast<std::size_t>(l.x()) * size.y() + l.y()) * size.z() + l.z();
  }
  bool contains(const Index3& g) const {
    const Index3 l = g - lo;
    return (l.array() >= 0).all() && (l.array() < size.array()).all();
  }
};

// Segment/box overlap interval in segment parameter t.
std::pair<double, double> clip_to_cell(const Vec3& from, const Vec3& to, const Index3& cell,
                                       double res) {
  const Vec3 lo = cell.cast<double>() * res;
  const Vec3 hi = lo.array() + res;
  const Vec3 d = to - from;
  double t0 = 0.0, t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) continue;
    double a = (lo[i] - from[i]) / d[i];
    double b = (hi[i] - from[i]) / d[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  if (t1 < t0) t1 = t0;
  return {t0, t1};
}

}  // namespace

std::optional<EscapeResult> bfs_escape(const map::InflatedGrid& grid, const Index3& start,
                                       double beta) {
  if (grid.is_free(start)) return EscapeResult{start, {}};
  if (!grid.window().contains(start)) return std::nullopt;

  const double res = grid.window().resolution();
  const int r = static_cast<int>(std::floor(beta / res));
  const LocalFrame frame{start.array() - r, Index3::Constant(2 * r + 1)};
  const double beta_cells_sq = (beta / res) * (beta / res);

  constexpr int kUnvisited = -1;
  std::vector<int> parent(static_cast<std::size_t>(frame.size.prod()), kUnvisited);
  std::deque<Index3> queue;
  parent[frame.index(start)] = static_cast<int>(frame.index(start));
  queue.push_back(start);

  const auto unwind = [&](const Index3& target) {
    std::vector<Index3> path{target};
    std::size_t i = frame.index(target);
    while (static_cast<std::size_t>(parent[i]) != i) {
      i = static_cast<std::size_t>(parent[i]);
      const auto sz = static_cast<std::size_t>(frame.size.y()) * frame.size.z();
      const Index3 l(static_cast<int>(i / sz), static_cast<int>((i / frame.size.z()) % frame.size.y()),
                     static_cast<int>(i % frame.size.z()));
      path.push_back(frame.lo + l);
    }
    std::reverse(path.begin(), path.end());
    return EscapeResult{target, std::move(path)};
  };

  while (!queue.empty()) {
    const Index3 c = queue.front();
    queue.pop_front();
    for (const auto& o : kFaceNeighbors) {
      const Index3 n = c + Index3(o[0], o[1], o[2]);
      if (!frame.contains(n) || (n - start).squaredNorm() > beta_cells_sq) continue;
      if (!grid.window().contains(n)) continue;
      const std::size_t ni = frame.index(n);
      if (parent[ni] != kUnvisited) continue;
      parent[ni] = static_cast<int>(frame.index(c));
      if (grid.is_free(n)) return unwind(n);
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

FarthestResult find_farthest_grid(const map::InflatedGrid& grid, const Vec3& from,
                                  const Vec3& to) {
  const double res = grid.window().resolution();
  FarthestResult out;
  bool blocked = false;
  map::traverse_segment(from, to, res, [&](const Index3& c) {
    if (!grid.is_free(c)) {
      blocked = true;
      return false;
    }
    out.cells.push_back(c);
    return true;
  });

  if (out.cells.empty()) {
    // The start itself is not free; degrade to a single-cell path.
    out.goal_cell = map::world_to_cell(from, res);
    out.cells.push_back(out.goal_cell);
    out.goal = from;
    return out;
  }
  out.goal_cell = out.cells.back();
  out.clear = !blocked;
  if (out.clear) {
    out.goal = to;
  } else {
    const auto [t0, t1] = clip_to_cell(from, to, out.goal_cell, res);
    out.goal = from + 0.5 * (t0 + t1) * (to - from);
  }
  return out;
}

std::vector<Vec3> ReferencePath::polyline() const {
  std::vector<Vec3> out;
  if (!p_inf.empty()) out.assign(p_inf.begin(), p_inf.end() - 1);
  out.push_back(start);
  if ((goal - start).squaredNorm() > 0.0) out.push_back(goal);
  return out;
}

std::size_t ReferencePath::free_begin() const { return p_inf.empty() ? 0 : p_inf.size() - 1; }

std::optional<ReferencePath> search_reference_path(const map::InflatedGrid& grid,
                                                   const Vec3& p_odom, const Vec3& p_goal,
                                                   double beta) {
  const auto& w = grid.window();
  const double res = w.resolution();
  const Aabb box = w.box();
  const Vec3 margin = Vec3::Constant(0.5 * res);
  const Vec3 goal = p_goal.cwiseMax(box.min + margin).cwiseMin(box.max - margin);

  ReferencePath path;
  Vec3 p_s = p_odom;
  const Index3 odom_cell = w.cell_of(p_odom);
  if (!grid.is_free(odom_cell)) {
    auto esc = bfs_escape(grid, odom_cell, beta);
    if (!esc) return std::nullopt;
    for (const auto& c : esc->cells) path.p_inf.push_back(w.center_of(c));
    p_s = w.center_of(esc->target);
  }
  path.start = p_s;

  Vec3 request = goal;
  const Index3 goal_cell = w.cell_of(goal);
  if (!grid.is_free(goal_cell)) {
    auto near = bfs_escape(grid, goal_cell, beta);
    if (!near) return std::nullopt;
    request = w.center_of(near->target);
    path.goal_was_inflated = true;
  }
  path.resolved_request = request;

  const FarthestResult far = find_farthest_grid(grid, p_s, request);
  for (const auto& c : far.cells) path.p_no_inf.push_back(w.center_of(c));
  path.goal = far.goal;
  return path;
}

}  // namespace canopy::planner
