#include "canopy/qp/admm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace canopy::qp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqualityScale = 1e3;

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

VectorXd project(const VectorXd& v, const VectorXd& l, const VectorXd& u) {
  return v.cwiseMax(l).cwiseMin(u);
}

// Ruiz equilibration of the KKT matrix [H A'; A 0] plus a cost scale.
struct Scaling {
  VectorXd D, E;
  double c = 1.0;
};

Scaling equilibrate(const MatrixXd& H, const VectorXd& g, const MatrixXd& A, int iterations) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(A.rows());
  Scaling s{VectorXd::Ones(n), VectorXd::Ones(m), 1.0};
  MatrixXd Hs = H, As = A;
  for (int it = 0; it < iterations; ++it) {
    VectorXd dcol(n), ecol(m);
    for (int j = 0; j < n; ++j) {
      double nrm = Hs.col(j).lpNorm<Eigen::Infinity>();
      if (m > 0) nrm = std::max(nrm, As.col(j).lpNorm<Eigen::Infinity>());
      dcol(j) = nrm < 1e-4 ? 1.0 : 1.0 / std::sqrt(std::min(nrm, 1e4));
    }
    for (int i = 0; i < m; ++i) {
      const double nrm = As.row(i).lpNorm<Eigen::Infinity>();
      ecol(i) = nrm < 1e-4 ? 1.0 : 1.0 / std::sqrt(std::min(nrm, 1e4));
    }
    Hs = dcol.asDiagonal() * Hs * dcol.asDiagonal();
    As = ecol.asDiagonal() * As * dcol.asDiagonal();
    s.D = s.D.cwiseProduct(dcol);
    s.E = s.E.cwiseProduct(ecol);
  }
  // Cost scaling keeps the objective's magnitude near one.
  const VectorXd gs = s.D.cwiseProduct(g);
  double mean_col = 0.0;
  for (int j = 0; j < n; ++j) mean_col += Hs.col(j).lpNorm<Eigen::Infinity>();
  mean_col = n ? mean_col / n : 0.0;
  const double nrm = std::max(mean_col, inf_norm(gs));
  s.c = nrm < 1e-4 ? 1.0 : 1.0 / std::min(nrm, 1e4);
  return s;
}

bool is_equality(double l, double u) { return std::abs(u - l) < 1e-9 * std::max(1.0, std::abs(l)); }
bool is_free_row(double l, double u) { return l <= -kInfinity && u >= kInfinity; }

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Solved: return "solved";
    case QpStatus::MaxIterations: return "max_iter";
    case QpStatus::PrimalInfeasible: return "infeasible";
    case QpStatus::DualInfeasible: return "unbounded";
  }
  return "unknown";
}

void QpProblem::validate() const {
  const auto n = g.size();
  if (H.rows() != n || H.cols() != n) throw std::invalid_argument("qp: H must be n x n");
  if (A.cols() != n && A.rows() > 0) throw std::invalid_argument("qp: A must have n columns");
  if (l.size() != A.rows() || u.size() != A.rows()) {
    throw std::invalid_argument("qp: bound sizes must match the rows of A");
  }
  if (!H.allFinite() || !g.allFinite() || !A.allFinite()) {
    throw std::invalid_argument("qp: non-finite problem data");
  }
  if ((H - H.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, H.lpNorm<Eigen::Infinity>())) {
    throw std::invalid_argument("qp: H is not symmetric");
  }
  if ((l.array() > u.array()).any()) throw std::invalid_argument("qp: l > u");
}

double primal_residual(const QpProblem& p, const VectorXd& x) {
  if (p.num_constraints() == 0) return 0.0;
  const VectorXd Ax = p.A * x;
  return inf_norm(Ax - project(Ax, p.l, p.u));
}

double dual_residual(const QpProblem& p, const VectorXd& x, const VectorXd& y) {
  VectorXd r = p.H * x + p.g;
  if (p.num_constraints() > 0) r += p.A.transpose() * y;
  return inf_norm(r);
}

namespace {

// Active-set refinement: solve the equality-constrained KKT system on the
// constraints the ADMM duals flag as active.
std::optional<QpSolution> polish(const QpProblem& p, const QpSolution& admm, double delta) {
  const int n = p.num_variables();
  const int m = p.num_constraints();
  const VectorXd Ax = m ? VectorXd(p.A * admm.x) : VectorXd();
  std::vector<int> rows;
  std::vector<double> rhs;
  for (int i = 0; i < m; ++i) {
    const bool lower = p.l(i) > -kInfinity && Ax(i) - p.l(i) < -admm.y(i);
    const bool upper = p.u(i) < kInfinity && p.u(i) - Ax(i) < admm.y(i);
    if (lower || upper) {
      rows.push_back(i);
      rhs.push_back(lower ? p.l(i) : p.u(i));
    }
  }
  const int k = static_cast<int>(rows.size());
  MatrixXd K = MatrixXd::Zero(n + k, n + k);
  K.topLeftCorner(n, n) = p.H;
  for (int r = 0; r < k; ++r) {
    K.block(n + r, 0, 1, n) = p.A.row(rows[r]);
    K.block(0, n + r, n, 1) = p.A.row(rows[r]).transpose();
  }
  VectorXd b(n + k);
  b.head(n) = -p.g;
  for (int r = 0; r < k; ++r) b(n + r) = rhs[r];

  MatrixXd Kreg = K;
  Kreg.diagonal().head(n).array() += delta;
  Kreg.diagonal().tail(k).array() -= delta;
  const Eigen::PartialPivLU<MatrixXd> lu(Kreg);
  VectorXd sol = lu.solve(b);
  for (int it = 0; it < 5; ++it) sol += lu.solve(b - K * sol);
  if (!sol.allFinite()) return std::nullopt;

  QpSolution out = admm;
  out.x = sol.head(n);
  out.y = VectorXd::Zero(m);
  for (int r = 0; r < k; ++r) out.y(rows[r]) = sol(n + r);
  out.primal_residual = primal_residual(p, out.x);
  out.dual_residual = dual_residual(p, out.x, out.y);
  // Dual signs must match the side the constraint is active on.
  for (int r = 0; r < k; ++r) {
    const int i = rows[r];
    const bool at_lower = rhs[r] == p.l(i) && p.l(i) != p.u(i);
    if (at_lower && out.y(i) > 1e-9) return std::nullopt;
    if (!at_lower && p.l(i) != p.u(i) && out.y(i) < -1e-9) return std::nullopt;
  }
  out.polished = true;
  return out;
}

}  // namespace

QpSolution AdmmSolver::solve(const QpProblem& problem, const std::optional<WarmStart>& warm) {
  problem.validate();
  const QpSettings& st = settings_;
  const int n = problem.num_variables();
  const int m = problem.num_constraints();

  {
    MatrixXd Hreg = problem.H;
    Hreg.diagonal().array() += std::max(st.regularization, 1e-8 * std::max(1.0, problem.H.diagonal().cwiseAbs().maxCoeff()));
    if (n > 0 && Eigen::LLT<MatrixXd>(Hreg).info() != Eigen::Success) {
      throw std::invalid_argument("qp: H is not positive semidefinite");
    }
  }

  const Scaling sc = equilibrate(problem.H, problem.g, problem.A, st.scaling_iterations);
  const MatrixXd H = sc.c * (sc.D.asDiagonal() * problem.H * sc.D.asDiagonal());
  const VectorXd g = sc.c * sc.D.cwiseProduct(problem.g);
  const MatrixXd A = sc.E.asDiagonal() * problem.A * sc.D.asDiagonal();
  VectorXd l(m), u(m);
  for (int i = 0; i < m; ++i) {
    l(i) = problem.l(i) <= -kInfinity ? -kInfinity : sc.E(i) * problem.l(i);
    u(i) = problem.u(i) >= kInfinity ? kInfinity : sc.E(i) * problem.u(i);
  }

  double rho = st.rho;
  VectorXd rho_vec(m);
  const auto set_rho = [&] {
    for (int i = 0; i < m; ++i) {
      if (is_free_row(problem.l(i), problem.u(i))) rho_vec(i) = kRhoMin;
      else if (is_equality(problem.l(i), problem.u(i))) rho_vec(i) = kRhoEqualityScale * rho;
      else rho_vec(i) = rho;
    }
  };
  set_rho();

  Eigen::LLT<MatrixXd> kkt;
  const auto factor = [&] {
    MatrixXd K = H;
    K.diagonal().array() += st.sigma;
    if (m > 0) K.noalias() += A.transpose() * rho_vec.asDiagonal() * A;
    kkt.compute(K);
    if (kkt.info() != Eigen::Success) throw std::invalid_argument("qp: KKT factorization failed");
  };
  factor();

  VectorXd x = VectorXd::Zero(n), y = VectorXd::Zero(m);
  if (warm && warm->x.size() == n) x = sc.D.cwiseInverse().cwiseProduct(warm->x);
  if (warm && warm->y.size() == m) y = sc.c * sc.E.cwiseInverse().cwiseProduct(warm->y);
  VectorXd z = m ? project(A * x, l, u) : VectorXd();

  QpSolution out;
  const auto unscale = [&](QpSolution& s) {
    s.x = sc.D.cwiseProduct(x);
    s.y = m ? VectorXd(sc.E.cwiseProduct(y) / sc.c) : VectorXd();
  };

  VectorXd x_tilde(n), z_tilde(m), z_prev(m), y_prev(m);
  int iter = 0;
  bool converged = false;
  for (iter = 1; iter <= st.max_iterations; ++iter) {
    z_prev = z;
    y_prev = y;
    VectorXd rhs = st.sigma * x - g;
    if (m > 0) rhs.noalias() += A.transpose() * (rho_vec.cwiseProduct(z) - y);
    x_tilde = kkt.solve(rhs);
    x = st.alpha * x_tilde + (1.0 - st.alpha) * x;
    if (m > 0) {
      z_tilde.noalias() = A * x_tilde;
      const VectorXd z_relaxed = st.alpha * z_tilde + (1.0 - st.alpha) * z_prev;
      z = project(z_relaxed + y.cwiseQuotient(rho_vec), l, u);
      y += rho_vec.cwiseProduct(z_relaxed - z);
    }

    const bool check = iter % st.check_interval == 0 || iter == st.max_iterations;
    const bool adapt = st.adaptive_rho && m > 0 && iter % st.adaptive_rho_interval == 0;
    if (!check && !adapt) continue;

    // Unscaled residuals and their normalizers.
    const VectorXd Ax = m ? VectorXd(A * x) : VectorXd();
    const VectorXd Hx = H * x;
    const VectorXd Aty = m ? VectorXd(A.transpose() * y) : VectorXd::Zero(n);
    const VectorXd Dinv = sc.D.cwiseInverse();
    const VectorXd Einv = sc.E.cwiseInverse();
    const double r_prim = m ? inf_norm(Einv.cwiseProduct(Ax - z)) : 0.0;
    const double r_dual = inf_norm(Dinv.cwiseProduct(Hx + g + Aty)) / sc.c;
    const double prim_scale = m ? std::max(inf_norm(Einv.cwiseProduct(Ax)), inf_norm(Einv.cwiseProduct(z))) : 0.0;
    const double dual_scale = std::max({inf_norm(Dinv.cwiseProduct(Hx)), inf_norm(Dinv.cwiseProduct(Aty)),
                                        inf_norm(Dinv.cwiseProduct(g))}) / sc.c;

    if (check) {
      if (r_prim <= st.eps_abs + st.eps_rel * prim_scale &&
          r_dual <= st.eps_abs + st.eps_rel * dual_scale) {
        converged = true;
        break;
      }
      if (m > 0) {
        // Primal infeasibility certificate on the dual step.
        const VectorXd dy = sc.E.cwiseProduct(y - y_prev);
        const double dy_norm = inf_norm(dy);
        if (dy_norm > 1e-12) {
          const VectorXd Atdy = sc.D.cwiseInverse().cwiseProduct(A.transpose() * (y - y_prev));
          double support = 0.0;
          bool bounded = true;
          for (int i = 0; i < m; ++i) {
            if (dy(i) > 0) {
              if (problem.u(i) >= kInfinity) { bounded = dy(i) < st.eps_infeasible * dy_norm && bounded; continue; }
              support += problem.u(i) * dy(i);
            } else if (dy(i) < 0) {
              if (problem.l(i) <= -kInfinity) { bounded = -dy(i) < st.eps_infeasible * dy_norm && bounded; continue; }
              support += problem.l(i) * dy(i);
            }
          }
          if (bounded && inf_norm(Atdy) <= st.eps_infeasible * dy_norm &&
              support < -st.eps_infeasible * dy_norm) {
            unscale(out);
            out.status = QpStatus::PrimalInfeasible;
            out.iterations = iter;
            out.primal_residual = primal_residual(problem, out.x);
            out.dual_residual = dual_residual(problem, out.x, out.y);
            return out;
          }
        }
      }
    }

    if (adapt) {
      const double num = r_prim / std::max(prim_scale, 1e-12);
      const double den = r_dual / std::max(dual_scale, 1e-12);
      const double rho_new = std::clamp(rho * std::sqrt(num / std::max(den, 1e-12)), kRhoMin, kRhoMax);
      if (rho_new > 5.0 * rho || rho_new < 0.2 * rho) {
        rho = rho_new;
        set_rho();
        factor();
      }
    }
  }

  unscale(out);
  out.iterations = std::min(iter, st.max_iterations);
  out.status = converged ? QpStatus::Solved : QpStatus::MaxIterations;
  out.primal_residual = primal_residual(problem, out.x);
  out.dual_residual = dual_residual(problem, out.x, out.y);

  if (st.polish && converged) {
    if (auto p = polish(problem, out, 1e-9)) {
      const double tol = 10.0 * st.eps_abs;
      if (p->primal_residual <= std::max(out.primal_residual, tol) &&
          p->dual_residual <= std::max(out.dual_residual, tol)) {
        p->iterations = out.iterations;
        out = *p;
      }
    }
  }
  return out;
}

}  // namespace canopy::qp
