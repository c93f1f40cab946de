#pragma once

// Random feasible convex QPs for solver cross-checks.

#include <random>

#include "canopy/qp/admm_solver.hpp"

namespace oracle {

/// n variables, m rows around a known feasible point. About a fifth of the
/// rows are one-sided and a tenth are equalities. With `singular` the
/// Hessian is rank-deficient, and every variable gets a box row so the
/// problem stays bounded.
inline canopy::qp::QpProblem random_qp(std::mt19937_64& rng, int n, int m, bool singular) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto randn = [&](int r, int c) {
    MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = n01(rng);
    return M;
  };

  canopy::qp::QpProblem p;
  const int rank = singular ? std::max(1, n / 2) : n;
  const MatrixXd M = randn(n, rank);
  p.H = M * M.transpose();
  if (!singular) p.H.diagonal().array() += 0.1;
  p.H = 0.5 * (p.H + p.H.transpose());
  p.g = 3.0 * randn(n, 1);

  const int rows = singular ? m + n : m;
  p.A = MatrixXd::Zero(rows, n);
  p.A.topRows(m) = randn(m, n);
  if (singular) p.A.bottomRows(n) = MatrixXd::Identity(n, n);
  const VectorXd x_feas = randn(n, 1);
  const VectorXd ax = p.A * x_feas;
  p.l.resize(rows);
  p.u.resize(rows);
  for (int i = 0; i < rows; ++i) {
    const double r = u01(rng);
    const double lo = ax(i) - 0.1 - u01(rng), hi = ax(i) + 0.1 + u01(rng);
    if (i >= m) {
      p.l(i) = lo - 1.0;
      p.u(i) = hi + 1.0;
    } else if (r < 0.1) {
      p.l(i) = p.u(i) = ax(i);
    } else if (r < 0.2) {
      p.l(i) = -canopy::qp::kInfinity;
      p.u(i) = hi;
    } else if (r < 0.3) {
      p.l(i) = lo;
      p.u(i) = canopy::qp::kInfinity;
    } else {
      p.l(i) = lo;
      p.u(i) = hi;
    }
  }
  return p;
}

}  // namespace oracle
