#include "canopy/map/probability_grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace canopy::map {

ProbabilityGrid::ProbabilityGrid(const GridConfig& cfg, const GridWindow& window)
    : cfg_(cfg),
      window_(window),
      l_hit_(cfg.l_hit()),
      l_miss_(cfg.l_miss()),
      log_odds_(window.size(), 0.0),
      state_(window.size(), CellState::Unknown),
      n_f_(window.size(), 0) {}

std::optional<CellTransition> ProbabilityGrid::apply(const Index3& g, Measurement m) {
  const std::size_t s = window_.slot(g);
  const double l = std::clamp(log_odds_[s] + (m == Measurement::Hit ? l_hit_ : l_miss_),
                              cfg_.l_min, cfg_.l_max);
  log_odds_[s] = l;
  const CellState next = cfg_.classify(l);
  if (next == state_[s]) return std::nullopt;
  CellTransition t{g, state_[s], next};
  state_[s] = next;
  return t;
}

std::optional<CellTransition> ProbabilityGrid::set_log_odds(const Index3& g, double l) {
  const std::size_t s = window_.slot(g);
  log_odds_[s] = std::clamp(l, cfg_.l_min, cfg_.l_max);
  const CellState next = cfg_.classify(log_odds_[s]);
  if (next == state_[s]) return std::nullopt;
  CellTransition t{g, state_[s], next};
  state_[s] = next;
  return t;
}

void ProbabilityGrid::on_state_change_frontier(const Index3& cell, CellState from, CellState to,
                                               const IndexBox* include,
                                               const IndexBox* exclude) {
  const int delta = int(to == CellState::KnownFree) - int(from == CellState::KnownFree);
  if (delta == 0) return;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -1; dz <= 1; ++dz) {
        const Index3 t = cell + Index3(dx, dy, dz);
        if (!window_.contains(t)) continue;
        if (include && !include->contains(t)) continue;
        if (exclude && exclude->contains(t)) continue;
        auto& n = n_f_[window_.slot(t)];
        if (delta < 0 && n == 0) throw std::logic_error("frontier counter underflow");
        n = static_cast<std::uint8_t>(n + delta);
      }
    }
  }
}

void ProbabilityGrid::reset_cell(const Index3& g) {
  const std::size_t s = window_.slot(g);
  log_odds_[s] = 0.0;
  state_[s] = CellState::Unknown;
  n_f_[s] = 0;
}

void ProbabilityGrid::reset_all() {
  std::fill(log_odds_.begin(), log_odds_.end(), 0.0);
  std::fill(state_.begin(), state_.end(), CellState::Unknown);
  std::fill(n_f_.begin(), n_f_.end(), 0);
}

}  // namespace canopy::map
