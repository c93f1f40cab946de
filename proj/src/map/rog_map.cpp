#include "canopy/map/rog_map.hpp"

#include <ostream>

#include "canopy/map/raycast.hpp"

namespace canopy::map {

namespace {

GridWindow make_window(const GridConfig& cfg, const Vec3& center) {
  GridWindow w(cfg.dims, cfg.resolution, Index3::Zero());
  w.set_origin(w.origin_for_center(center));
  return w;
}

}  // namespace

RogMap::RogMap(const GridConfig& cfg, const Vec3& center)
    : cfg_((cfg.validate(), cfg)),
      prob_(cfg, make_window(cfg, center)),
      infl_(cfg, make_window(cfg, center)) {}

void RogMap::dispatch(const CellTransition& t, std::vector<CellTransition>* out) {
  infl_.on_state_change_inflate(t.cell, t.from, t.to);
  prob_.on_state_change_frontier(t.cell, t.from, t.to);
  if (out) out->push_back(t);
}

void RogMap::update(const Index3& g, Measurement m, std::vector<CellTransition>* out) {
  if (!in_window(g)) return;
  if (auto t = prob_.apply(g, m)) dispatch(*t, out);
}

void RogMap::set_log_odds(const Index3& g, double l, std::vector<CellTransition>* out) {
  if (!in_window(g)) return;
  if (auto t = prob_.set_log_odds(g, l)) dispatch(*t, out);
}

std::vector<Vec3> RogMap::classify_infinite_points(const Vec3& origin,
                                                   std::span<const Vec3> invalid_dirs) const {
  std::vector<Vec3> out;
  out.reserve(invalid_dirs.size());
  const double res = cfg_.resolution;
  for (const auto& dir : invalid_dirs) {
    bool blocked = false;
    traverse_segment(origin, origin + dir * cfg_.infinite_check_range, res,
                     [&](const Index3& c) {
                       if (prob_.state(c) == CellState::Occupied) {
                         blocked = true;
                         return false;
                       }
                       return true;
                     });
    if (!blocked) out.push_back(dir);
  }
  return out;
}

std::vector<CellTransition> RogMap::integrate_scan(const LidarScan& scan) {
  std::vector<CellTransition> transitions;
  std::vector<Vec3> invalid;
  const double res = cfg_.resolution;
  const Vec3& origin = scan.origin;

  for (const auto& pt : scan.points) {
    if (!pt.valid()) {
      invalid.push_back(pt.direction);
      continue;
    }
    const double range = *pt.range;
    const Vec3 endpoint = origin + pt.direction * range;
    const Index3 hit = cell_of(endpoint);
    if (range <= cfg_.raycast_range) {
      traverse_segment(origin, endpoint, res, [&](const Index3& c) {
        if (!in_window(c)) return false;
        if (c != hit) update(c, Measurement::Miss, &transitions);
        return true;
      });
    } else {
      traverse_segment(origin, origin + pt.direction * cfg_.raycast_range, res,
                       [&](const Index3& c) {
                         if (!in_window(c)) return false;
                         if (c != hit) update(c, Measurement::Miss, &transitions);
                         return true;
                       });
    }
    update(hit, Measurement::Hit, &transitions);
  }

  // Classification sees the hits of this scan.
  const auto sky = classify_infinite_points(origin, invalid);
  const double reach = window().box().extent().norm();
  for (const auto& dir : sky) {
    traverse_segment(origin, origin + dir * reach, res, [&](const Index3& c) {
      if (!in_window(c)) return false;
      update(c, Measurement::Miss, &transitions);
      return true;
    });
  }
  return transitions;
}

bool RogMap::slide_to(const Vec3& center) {
  const IndexBox old_box = window().bounds();
  const Index3 new_origin = window().origin_for_center(center);
  if (new_origin == old_box.lo) return false;
  const IndexBox new_box{new_origin, new_origin + cfg_.dims};
  const IndexBox keep = old_box.intersect(new_box);

  if (keep.empty()) {
    prob_.set_origin(new_origin);
    infl_.set_origin(new_origin);
    prob_.reset_all();
    infl_.reset_all();
    return true;
  }

  const int reach = infl_.reach();

  // 1. Cells leaving the window turn into "outside" (= Unknown). Withdraw
  //    their influence from the surviving cells.
  for_each_in_box_minus(keep.expanded(reach).intersect(old_box), keep, [&](const Index3& g) {
    const CellState s = prob_.state(g);
    if (s == CellState::Unknown) return;
    infl_.on_state_change_inflate(g, s, CellState::Unknown, &keep, nullptr);
    prob_.on_state_change_frontier(g, s, CellState::Unknown, &keep, nullptr);
  });

  // 2. Move the window; the vacated slots now hold the entering cells, which
  //    start as Unknown with all-Unknown counters.
  prob_.set_origin(new_origin);
  infl_.set_origin(new_origin);
  for_each_in_box_minus(new_box, keep, [&](const Index3& g) {
    prob_.reset_cell(g);
    infl_.reset_cell(g);
  });

  // 3. Surviving non-Unknown cells near the entering region push their
  //    influence onto it.
  IndexBox interior = keep;
  for (int i = 0; i < 3; ++i) {
    if (new_box.lo[i] < keep.lo[i]) interior.lo[i] += reach;
    if (new_box.hi[i] > keep.hi[i]) interior.hi[i] -= reach;
  }
  interior = interior.intersect(keep);
  for_each_in_box_minus(keep, interior, [&](const Index3& g) {
    const CellState s = prob_.state(g);
    if (s == CellState::Unknown) return;
    infl_.on_state_change_inflate(g, CellState::Unknown, s, nullptr, &keep);
    prob_.on_state_change_frontier(g, CellState::Unknown, s, nullptr, &keep);
  });
  return true;
}

bool RogMap::recenter(const Vec3& p) {
  if ((p - window().center()).norm() <= cfg_.slide_threshold) return false;
  return slide_to(p);
}

void RogMap::dump(std::ostream& os, bool include_unknown) const {
  for_each_in_box(window().bounds(), [&](const Index3& g) {
    const CellState s = prob_.state(g);
    if (s == CellState::Unknown && !include_unknown) return;
    const Vec3 c = center_of(g);
    os << c.x() << ' ' << c.y() << ' ' << c.z() << ' ' << to_string(s) << '\n';
  });
}

std::size_t RogMap::occupied_count() const {
  std::size_t n = 0;
  for_each_in_box(window().bounds(), [&](const Index3& g) {
    n += prob_.state(g) == CellState::Occupied;
  });
  return n;
}

}  // namespace canopy::map
