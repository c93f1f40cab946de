#pragma once

#include <optional>
#include <vector>

#include "canopy/mpc/flatness.hpp"
#include "canopy/mpc/mpc_qp.hpp"

namespace canopy::mpc {

enum class MpcStatus { Solved, Degraded, Infeasible };

const char* to_string(MpcStatus s);

struct MpcSolution {
  std::vector<Vec3> jerks;         // u_0 .. u_{N-1}
  std::vector<MpcState> states;    // x_1 .. x_N
  MpcStatus status = MpcStatus::Infeasible;
  int iterations = 0;
  double solve_time = 0.0;         // wall clock, s
  double slack = 0.0;
  double max_violation = 0.0;      // worst kinematic/corridor row violation
  Eigen::VectorXd dual;            // QP multipliers, kept for warm starting
};

/// Solves the condensed QP. `warm` is the previous solution's U shifted by
/// one stage (see MpcController).
MpcSolution solve_mpc(const MpcQp& problem, const MpcState& x0, const MpcConfig& cfg,
                      qp::AdmmSolver& solver, const std::optional<qp::WarmStart>& warm);

/// Receding-horizon controller: builds, warm-starts and solves the MPC, then
/// maps the first stage to an attitude command. Falls back to a braking
/// command if the solve fails.
class MpcController {
 public:
  explicit MpcController(const MpcConfig& cfg, qp::QpSettings settings = {});

  const MpcConfig& config() const { return cfg_; }

  MpcSolution solve(const std::vector<Vec3>& refs, const MpcState& x0,
                    const planner::Polytope* sfc);

  /// Command for a solution; braking fallback unless status is Solved.
  AttitudeCommand command(const MpcSolution& sol, const MpcState& x0, double yaw,
                          double yaw_ref) const;
  AttitudeCommand braking_command(const MpcState& x0, double yaw, double yaw_ref) const;

  void reset() {
    last_.reset();
    last_dual_.reset();
  }

 private:
  MpcConfig cfg_;
  qp::AdmmSolver solver_;
  std::optional<MpcSolution> last_;
  std::optional<Eigen::VectorXd> last_dual_;
};

}  // namespace canopy::mpc
