#include "canopy/mpc/mpc_qp.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace canopy::mpc {

namespace {

bool is_psd(const Eigen::Matrix3d& m) {
  if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff() >= -1e-12;
}

// Scalar triple-integrator responses to a unit jerk applied at stage k,
// observed at stage n > k.
struct Response {
  double p, v, a;
};

Response unit_response(int steps, double dt) {
  // Jerk held over one interval, then free propagation for steps - 1.
  double p = dt * dt * dt / 6.0;
  double v = dt * dt / 2.0;
  double a = dt;
  for (int i = 1; i < steps; ++i) {
    p = p + dt * v + 0.5 * dt * dt * a;
    v = v + dt * a;
  }
  return {p, v, a};
}

}  // namespace

void MpcConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::invalid_argument("mpc: " + what);
  };
  if (horizon < 2) fail("horizon must be >= 2");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!is_psd(R_p) || !is_psd(R_u) || !is_psd(R_c) || !is_psd(R_v_terminal) ||
      !is_psd(R_a_terminal)) {
    fail("weight matrices must be symmetric positive semidefinite");
  }
  if (!(v_max.minCoeff() > 0.0) || !(a_max_xy > 0.0) || !(j_max.minCoeff() > 0.0)) {
    fail("kinematic limits must be positive");
  }
  if (!(a_z_min > -gravity)) fail("a_z_min must exceed -g");
  if (!(a_z_max > a_z_min)) fail("a_z_max must exceed a_z_min");
  if (!(v_ref >= 0.0)) fail("v_ref must be non-negative");
  if (!(throttle_coeff > 0.0)) fail("throttle_coeff must be positive");
  if (!(brake_gain >= 0.0)) fail("brake_gain must be non-negative");
  if (!(slack_weight > 0.0)) fail("slack_weight must be positive");
}

MpcState propagate(const MpcState& x, const Vec3& jerk, double dt) {
  MpcState n;
  n.p = x.p + dt * x.v + 0.5 * dt * dt * x.a + dt * dt * dt / 6.0 * jerk;
  n.v = x.v + dt * x.a + 0.5 * dt * dt * jerk;
  n.a = x.a + dt * jerk;
  return n;
}

std::vector<MpcState> predict(const MpcState& x0, const std::vector<Vec3>& jerks, double dt) {
  std::vector<MpcState> out;
  out.reserve(jerks.size());
  MpcState x = x0;
  for (const Vec3& j : jerks) {
    x = propagate(x, j, dt);
    out.push_back(x);
  }
  return out;
}

MpcQp build_qp(const std::vector<Vec3>& refs, const MpcState& x0, const planner::Polytope* sfc,
               const MpcConfig& cfg) {
  const int N = cfg.horizon;
  if (static_cast<int>(refs.size()) != N) {
    throw std::invalid_argument("build_qp: expected " + std::to_string(N) + " references, got " +
                                std::to_string(refs.size()));
  }
  const double dt = cfg.dt;
  const int nu = 3 * N;

  // Free response (U = 0) and block-Toeplitz input maps, per stage n = 1..N.
  std::vector<MpcState> free(static_cast<std::size_t>(N));
  {
    MpcState x = x0;
    for (int n = 0; n < N; ++n) {
      x = propagate(x, Vec3::Zero(), dt);
      free[static_cast<std::size_t>(n)] = x;
    }
  }
  std::vector<Response> resp(static_cast<std::size_t>(N) + 1);
  for (int s = 1; s <= N; ++s) resp[static_cast<std::size_t>(s)] = unit_response(s, dt);

  Eigen::MatrixXd Gp = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd Gv = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd Ga = Eigen::MatrixXd::Zero(nu, nu);
  for (int n = 1; n <= N; ++n) {
    for (int k = 0; k < n; ++k) {
      const Response& r = resp[static_cast<std::size_t>(n - k)];
      for (int ax = 0; ax < 3; ++ax) {
        Gp(3 * (n - 1) + ax, 3 * k + ax) = r.p;
        Gv(3 * (n - 1) + ax, 3 * k + ax) = r.v;
        Ga(3 * (n - 1) + ax, 3 * k + ax) = r.a;
      }
    }
  }
  Eigen::VectorXd fp(nu), fv(nu), fa(nu), ref(nu);
  for (int n = 0; n < N; ++n) {
    const auto& x = free[static_cast<std::size_t>(n)];
    fp.segment<3>(3 * n) = x.p;
    fv.segment<3>(3 * n) = x.v;
    fa.segment<3>(3 * n) = x.a;
    ref.segment<3>(3 * n) = refs[static_cast<std::size_t>(n)];
  }

  MpcQp out;
  out.horizon = N;
  out.corridor_stage.assign(static_cast<std::size_t>(N), false);
  out.slack = sfc != nullptr && !sfc->empty() && !sfc->contains(x0.p);
  const int nx = nu + (out.slack ? 1 : 0);

  // Objective.
  Eigen::MatrixXd Qp = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd Qu = Eigen::MatrixXd::Zero(nu, nu);
  for (int n = 0; n < N; ++n) {
    Qp.block<3, 3>(3 * n, 3 * n) = cfg.R_p;
    Qu.block<3, 3>(3 * n, 3 * n) = cfg.R_u;
  }
  // Differencing operator: (u_{n+1} - u_n), n = 0..N-2.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3 * (N - 1), nu);
  Eigen::MatrixXd Qc = Eigen::MatrixXd::Zero(3 * (N - 1), 3 * (N - 1));
  for (int n = 0; n + 1 < N; ++n) {
    D.block<3, 3>(3 * n, 3 * (n + 1)).setIdentity();
    D.block<3, 3>(3 * n, 3 * n) = -Eigen::Matrix3d::Identity();
    Qc.block<3, 3>(3 * n, 3 * n) = cfg.R_c;
  }
  const auto GvN = Gv.bottomRows<3>();
  const auto GaN = Ga.bottomRows<3>();
  const Vec3 fvN = fv.tail<3>();
  const Vec3 faN = fa.tail<3>();

  Eigen::MatrixXd H = Gp.transpose() * Qp * Gp + Qu + D.transpose() * Qc * D +
                      GvN.transpose() * cfg.R_v_terminal * GvN +
                      GaN.transpose() * cfg.R_a_terminal * GaN;
  Eigen::VectorXd g = Gp.transpose() * Qp * (fp - ref) +
                      GvN.transpose() * cfg.R_v_terminal * fvN +
                      GaN.transpose() * cfg.R_a_terminal * faN;
  out.qp.H = Eigen::MatrixXd::Zero(nx, nx);
  out.qp.g = Eigen::VectorXd::Zero(nx);
  out.qp.H.topLeftCorner(nu, nu) = 2.0 * H;
  out.qp.H.topLeftCorner(nu, nu) =
      0.5 * (out.qp.H.topLeftCorner(nu, nu) + out.qp.H.topLeftCorner(nu, nu).transpose());
  out.qp.g.head(nu) = 2.0 * g;
  if (out.slack) {
    out.qp.H(nu, nu) = 2.0 * cfg.slack_weight;
    out.qp.g(nu) = cfg.slack_weight;
  }

  // Eligible corridor stages.
  int corridor_rows = 0;
  if (sfc != nullptr && !sfc->empty()) {
    for (int n = 0; n < N; ++n) {
      if (sfc->contains(refs[static_cast<std::size_t>(n)])) {
        out.corridor_stage[static_cast<std::size_t>(n)] = true;
        corridor_rows += sfc->size();
      }
    }
  }
  out.kinematic_rows = 18 * N;
  out.corridor_rows = corridor_rows;
  const int m = out.kinematic_rows + corridor_rows + (out.slack ? 1 : 0);
  out.qp.A = Eigen::MatrixXd::Zero(m, nx);
  out.qp.l = Eigen::VectorXd::Constant(m, -qp::kInfinity);
  out.qp.u = Eigen::VectorXd::Constant(m, qp::kInfinity);

  const Vec3 a_hi(cfg.a_max_xy, cfg.a_max_xy, cfg.a_z_max);
  const Vec3 a_lo(-cfg.a_max_xy, -cfg.a_max_xy, cfg.a_z_min);
  int row = 0;
  for (int n = 0; n < N; ++n) {
    const int s = 3 * n;
    for (int ax = 0; ax < 3; ++ax) {  // v_{n+1} <= v_max
      out.qp.A.block(row, 0, 1, nu) = Gv.row(s + ax);
      out.qp.u(row++) = cfg.v_max(ax) - fv(s + ax);
    }
    for (int ax = 0; ax < 3; ++ax) {  // -v_{n+1} <= v_max
      out.qp.A.block(row, 0, 1, nu) = -Gv.row(s + ax);
      out.qp.u(row++) = cfg.v_max(ax) + fv(s + ax);
    }
    for (int ax = 0; ax < 3; ++ax) {
      out.qp.A.block(row, 0, 1, nu) = Ga.row(s + ax);
      out.qp.u(row++) = a_hi(ax) - fa(s + ax);
    }
    for (int ax = 0; ax < 3; ++ax) {
      out.qp.A.block(row, 0, 1, nu) = -Ga.row(s + ax);
      out.qp.u(row++) = -a_lo(ax) + fa(s + ax);
    }
    for (int ax = 0; ax < 3; ++ax) {  // j_n
      out.qp.A(row, s + ax) = 1.0;
      out.qp.u(row++) = cfg.j_max(ax);
    }
    for (int ax = 0; ax < 3; ++ax) {
      out.qp.A(row, s + ax) = -1.0;
      out.qp.u(row++) = cfg.j_max(ax);
    }
  }
  if (corridor_rows > 0) {
    for (int n = 0; n < N; ++n) {
      if (!out.corridor_stage[static_cast<std::size_t>(n)]) continue;
      const Eigen::MatrixXd CG = sfc->C * Gp.middleRows(3 * n, 3);
      const Eigen::VectorXd rhs = sfc->d - sfc->C * fp.segment<3>(3 * n);
      for (int i = 0; i < sfc->size(); ++i) {
        out.qp.A.block(row, 0, 1, nu) = CG.row(i);
        if (out.slack) out.qp.A(row, nu) = -1.0;
        out.qp.u(row++) = rhs(i);
      }
    }
  }
  if (out.slack) {
    out.qp.A(row, nu) = 1.0;
    out.qp.l(row++) = 0.0;
  }
  return out;
}

double mpc_cost(const std::vector<Vec3>& refs, const MpcState& x0, const std::vector<Vec3>& jerks,
                const MpcConfig& cfg) {
  if (refs.size() != jerks.size() || static_cast<int>(refs.size()) != cfg.horizon) {
    throw std::invalid_argument("mpc_cost: size mismatch");
  }
  const auto xs = predict(x0, jerks, cfg.dt);
  double c = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const Vec3 e = refs[n] - xs[n].p;
    c += e.dot(cfg.R_p * e) + jerks[n].dot(cfg.R_u * jerks[n]);
  }
  for (std::size_t n = 0; n + 1 < jerks.size(); ++n) {
    const Vec3 du = jerks[n + 1] - jerks[n];
    c += du.dot(cfg.R_c * du);
  }
  c += xs.back().v.dot(cfg.R_v_terminal * xs.back().v);
  c += xs.back().a.dot(cfg.R_a_terminal * xs.back().a);
  return c;
}

}  // namespace canopy::mpc
