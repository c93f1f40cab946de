#include "canopy/mpc/mpc_controller.hpp"

#include <algorithm>
#include <chrono>

namespace canopy::mpc {

const char* to_string(MpcStatus s) {
  switch (s) {
    case MpcStatus::Solved: return "solved";
    case MpcStatus::Degraded: return "degraded";
    case MpcStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

MpcSolution solve_mpc(const MpcQp& problem, const MpcState& x0, const MpcConfig& cfg,
                      qp::AdmmSolver& solver, const std::optional<qp::WarmStart>& warm) {
  const auto t0 = std::chrono::steady_clock::now();
  const qp::QpSolution qs = solver.solve(problem.qp, warm);
  const auto t1 = std::chrono::steady_clock::now();

  MpcSolution sol;
  sol.iterations = qs.iterations;
  sol.solve_time = std::chrono::duration<double>(t1 - t0).count();
  switch (qs.status) {
    case qp::QpStatus::Solved: sol.status = MpcStatus::Solved; break;
    case qp::QpStatus::MaxIterations: sol.status = MpcStatus::Degraded; break;
    default: sol.status = MpcStatus::Infeasible; break;
  }
  const int N = problem.horizon;
  sol.jerks.resize(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) sol.jerks[static_cast<std::size_t>(n)] = qs.x.segment<3>(3 * n);
  if (problem.slack) sol.slack = std::max(0.0, qs.x(3 * N));
  sol.states = predict(x0, sol.jerks, cfg.dt);
  sol.max_violation = qp::primal_residual(problem.qp, qs.x);
  sol.dual = qs.y;
  return sol;
}

MpcController::MpcController(const MpcConfig& cfg, qp::QpSettings settings)
    : cfg_(cfg), solver_(settings) {
  cfg_.validate();
}

MpcSolution MpcController::solve(const std::vector<Vec3>& refs, const MpcState& x0,
                                 const planner::Polytope* sfc) {
  const MpcQp problem = build_qp(refs, x0, sfc, cfg_);
  const int N = problem.horizon;
  const int n = problem.qp.num_variables();
  const int m = problem.qp.num_constraints();

  std::optional<qp::WarmStart> warm;
  if (last_ && static_cast<int>(last_->jerks.size()) == N &&
      (last_->status == MpcStatus::Solved || last_->status == MpcStatus::Degraded)) {
    qp::WarmStart ws;
    ws.x = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < N; ++k) {
      const int src = std::min(k + 1, N - 1);
      ws.x.segment<3>(3 * k) = last_->jerks[static_cast<std::size_t>(src)];
    }
    if (problem.slack) ws.x(3 * N) = last_->slack;
    // Kinematic duals are stage-blocked (18 rows per stage) and shift with U;
    // corridor and slack duals restart at zero.
    ws.y = Eigen::VectorXd::Zero(m);
    if (last_dual_ && last_dual_->size() >= 18 * N) {
      for (int k = 0; k < N; ++k) {
        const int src = std::min(k + 1, N - 1);
        ws.y.segment(18 * k, 18) = last_dual_->segment(18 * src, 18);
      }
    }
    warm = std::move(ws);
  }

  MpcSolution sol = solve_mpc(problem, x0, cfg_, solver_, warm);

  if (sol.status == MpcStatus::Infeasible) {
    last_.reset();
    last_dual_.reset();
  } else {
    last_ = sol;
    last_dual_ = sol.dual;
  }
  return sol;
}

AttitudeCommand MpcController::braking_command(const MpcState& x0, double yaw,
                                               double yaw_ref) const {
  Vec3 a = -cfg_.brake_gain * x0.v;
  a.x() = std::clamp(a.x(), -cfg_.a_max_xy, cfg_.a_max_xy);
  a.y() = std::clamp(a.y(), -cfg_.a_max_xy, cfg_.a_max_xy);
  a.z() = std::clamp(a.z(), cfg_.a_z_min, cfg_.a_z_max);
  const auto cmd =
      flatness_transform(a, Vec3::Zero(), yaw, yaw_ref, cfg_.throttle_coeff, cfg_.gravity);
  if (cmd) return *cmd;
  // a_z_min > -g makes |t| > 0, so this is only reached for non-finite input.
  AttitudeCommand hover;
  hover.throttle = cfg_.throttle_coeff * cfg_.gravity;
  return hover;
}

AttitudeCommand MpcController::command(const MpcSolution& sol, const MpcState& x0, double yaw,
                                       double yaw_ref) const {
  if (sol.status != MpcStatus::Solved || sol.states.empty() || sol.jerks.empty()) {
    return braking_command(x0, yaw, yaw_ref);
  }
  const auto cmd = flatness_transform(sol.states.front().a, sol.jerks.front(), yaw, yaw_ref,
                                      cfg_.throttle_coeff, cfg_.gravity);
  return cmd ? *cmd : braking_command(x0, yaw, yaw_ref);
}

}  // namespace canopy::mpc
