#pragma once

#include <optional>
#include <vector>

#include "canopy/map/inflated_grid.hpp"

namespace canopy::planner {

/// Breadth-first escape out of inflated space. `cells` runs from the start
/// cell to `target` inclusive, so its length minus one is the BFS distance.
struct EscapeResult {
  Index3 target;
  std::vector<Index3> cells;
};

/// Searches 6-connected neighbors, visiting only cells whose centers lie
/// within `beta` meters of the start cell center and inside the window.
/// Returns nullopt (Unreachable) if no No-Inflation cell is found.
std::optional<EscapeResult> bfs_escape(const map::InflatedGrid& grid, const Index3& start,
                                       double beta);

struct FarthestResult {
  Vec3 goal;                  // point on [from, to] inside the last free cell
  Index3 goal_cell;
  std::vector<Index3> cells;  // traversed free cells, from `from`'s cell to goal_cell
  bool clear = false;         // the whole segment is free
};

/// Walks [from, to] cell by cell and stops before the first cell that is not
/// No Inflation. If the whole segment is free the goal is `to` itself.
FarthestResult find_farthest_grid(const map::InflatedGrid& grid, const Vec3& from, const Vec3& to);

struct ReferencePath {
  std::vector<Vec3> p_inf;     // escape segment cell centers, start cell .. p_s (may be empty)
  std::vector<Vec3> p_no_inf;  // free segment cell centers, p_s .. goal cell
  Vec3 start = Vec3::Zero();   // p_s
  Vec3 goal = Vec3::Zero();    // resolved local goal
  double yaw_ref = 0.0;
  bool goal_was_inflated = false;
  Vec3 resolved_request = Vec3::Zero();  // p_g, or p_gn when p_g was inflated

  /// Geometric path for reference sampling: escape cell centers followed by
  /// the straight free segment [start, goal].
  std::vector<Vec3> polyline() const;
  /// Index in polyline() where the free segment starts.
  std::size_t free_begin() const;
};

/// Two-segment reference path search. The requested goal is clamped into
/// the window first. Returns nullopt when either breadth-first search fails.
std::optional<ReferencePath> search_reference_path(const map::InflatedGrid& grid,
                                                   const Vec3& p_odom, const Vec3& p_goal,
                                                   double beta);

}  // namespace canopy::planner
