#pragma once

#include <cstdint>
#include <vector>

#include "canopy/mpc/mpc_config.hpp"
#include "canopy/planner/polytope.hpp"

namespace canopy::mpc {

struct MpcInstance {
  std::vector<Vec3> refs;
  MpcState x0;
  planner::Polytope sfc;
};

/// Consecutive MPC problems, one per 10 ms control period, along a smooth
/// curved flight through a box corridor. Deterministic in `seed`; the
/// sequence is meant for timing and warm-start statistics.
std::vector<MpcInstance> benchmark_sequence(int count, const MpcConfig& cfg, std::uint64_t seed,
                                            double control_period = 0.01);

}  // namespace canopy::mpc
