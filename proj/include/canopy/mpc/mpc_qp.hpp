#pragma once

#include <vector>

#include "canopy/mpc/mpc_config.hpp"
#include "canopy/planner/polytope.hpp"
#include "canopy/qp/admm_solver.hpp"

namespace canopy::mpc {

/// Condensed MPC: states are eliminated through the triple-integrator model,
/// so the decision vector is U = [j_0; ...; j_{N-1}] (plus one corridor slack
/// when the start state lies outside the corridor).
struct MpcQp {
  qp::QpProblem qp;
  int horizon = 0;
  int kinematic_rows = 0;            // N * 18 one-sided limit rows
  int corridor_rows = 0;
  std::vector<bool> corridor_stage;  // stage n = 1..N carries corridor rows
  bool slack = false;
};

/// One step of the triple integrator under constant jerk.
MpcState propagate(const MpcState& x, const Vec3& jerk, double dt);

/// x_1..x_N for jerk sequence U.
std::vector<MpcState> predict(const MpcState& x0, const std::vector<Vec3>& jerks, double dt);

/// Builds the QP. Throws std::invalid_argument if refs.size() != horizon.
/// Corridor rows are added only for stages whose reference lies in `sfc`.
MpcQp build_qp(const std::vector<Vec3>& refs, const MpcState& x0, const planner::Polytope* sfc,
               const MpcConfig& cfg);

/// The MPC cost evaluated directly on a jerk sequence (for checks).
double mpc_cost(const std::vector<Vec3>& refs, const MpcState& x0, const std::vector<Vec3>& jerks,
                const MpcConfig& cfg);

}  // namespace canopy::mpc
