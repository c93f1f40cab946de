#pragma once

#include <optional>

#include <Eigen/Dense>

namespace canopy::qp {

/// Bounds at or beyond this magnitude are treated as infinite.
inline constexpr double kInfinity = 1e30;

/// min 1/2 x'Hx + g'x  s.t.  l <= Ax <= u
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A;
  Eigen::VectorXd l;
  Eigen::VectorXd u;

  int num_variables() const { return static_cast<int>(g.size()); }
  int num_constraints() const { return static_cast<int>(l.size()); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(H * x) + g.dot(x); }
  /// Throws std::invalid_argument on inconsistent sizes, asymmetric H or l > u.
  void validate() const;
};

enum class QpStatus { Solved, MaxIterations, PrimalInfeasible, DualInfeasible };

const char* to_string(QpStatus s);

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // dual, sign convention: Hx + g + A'y = 0
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
  double primal_residual = 0.0;  // |Ax - proj_[l,u](Ax)|_inf
  double dual_residual = 0.0;    // |Hx + g + A'y|_inf
  bool polished = false;
};

struct QpSettings {
  double eps_abs = 1e-5;
  double eps_rel = 1e-5;
  double eps_infeasible = 1e-6;
  int max_iterations = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool adaptive_rho = true;
  int adaptive_rho_interval = 25;
  int check_interval = 5;
  int scaling_iterations = 10;
  double regularization = 1e-8;
  bool polish = true;
};

struct WarmStart {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Dense ADMM operator-splitting solver (OSQP iteration with Ruiz
/// equilibration, residual-balanced rho and active-set polishing).
/// Instances are reusable but not thread-safe.
class AdmmSolver {
 public:
  explicit AdmmSolver(QpSettings settings = {}) : settings_(settings) {}

  /// Throws std::invalid_argument if H is not positive semidefinite.
  QpSolution solve(const QpProblem& problem, const std::optional<WarmStart>& warm = std::nullopt);

  const QpSettings& settings() const { return settings_; }
  QpSettings& settings() { return settings_; }

 private:
  QpSettings settings_;
};

/// Residuals of (x, y) on the unscaled problem.
double primal_residual(const QpProblem& p, const Eigen::VectorXd& x);
double dual_residual(const QpProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace canopy::qp
