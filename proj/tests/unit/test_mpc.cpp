#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "canopy/mpc/flatness.hpp"
#include "canopy/mpc/mpc_controller.hpp"
#include "canopy/mpc/mpc_qp.hpp"
#include "canopy/mpc/reference_sampler.hpp"
#include "mpc_oracle.hpp"

namespace {

using namespace canopy;
using namespace canopy::mpc;
using planner::Polytope;

Polytope box(const Vec3& lo, const Vec3& hi) {
  Polytope p;
  for (int i = 0; i < 3; ++i) {
    p.add(Vec3::Unit(i), hi(i));
    p.add(-Vec3::Unit(i), -lo(i));
  }
  return p;
}

TEST(SampleReferences, DegeneratePathRepeatsProjection) {
  const std::vector<Vec3> path{Vec3(1, 2, 3)};
  const auto refs = sample_references(path, 0, Vec3::Zero(), 0.1, 20, nullptr);
  ASSERT_EQ(refs.size(), 20u);
  for (const auto& r : refs) EXPECT_EQ(r, Vec3(1, 2, 3));
}

TEST(SampleReferences, StraightPathUniformSpacing) {
  const std::vector<Vec3> path{Vec3::Zero(), Vec3(10, 0, 0)};
  const auto refs = sample_references(path, 0, Vec3::Zero(), 1.0 * 0.1, 20, nullptr);
  ASSERT_EQ(refs.size(), 20u);
  for (int n = 0; n < 20; ++n) EXPECT_NEAR((refs[n] - Vec3(0.1 * n, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(SampleReferences, CorridorTruncatesAtLastInsideSample) {
  const std::vector<Vec3> path{Vec3::Zero(), Vec3(10, 0, 0)};
  const Polytope sfc = box(Vec3(-1, -1, -1), Vec3(0.45, 1, 1));
  const auto refs = sample_references(path, 0, Vec3::Zero(), 0.1, 20, &sfc);
  ASSERT_EQ(refs.size(), 20u);
  // Five samples advance (0.0 .. 0.4 m); 0.5 m is outside, so the rest hold
  // the last sample inside the corridor.
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(refs[n].x(), 0.1 * n, 1e-12);
  for (int n = 5; n < 20; ++n) EXPECT_EQ(refs[n], refs[4]);
  for (const auto& r : refs) EXPECT_TRUE(sfc.contains(r));
}

TEST(SampleReferences, StartsAtClosestPointAndStopsAtEnd) {
  const std::vector<Vec3> path{Vec3::Zero(), Vec3(1, 0, 0), Vec3(1, 1, 0)};
  const auto refs = sample_references(path, 0, Vec3(0.5, -0.3, 0), 0.3, 10, nullptr);
  EXPECT_TRUE(refs[0].isApprox(Vec3(0.5, 0, 0)));
  EXPECT_TRUE(refs[1].isApprox(Vec3(0.8, 0, 0)));
  EXPECT_TRUE(refs[2].isApprox(Vec3(1.0, 0.1, 0)));
  EXPECT_EQ(refs.back(), Vec3(1, 1, 0));
}

TEST(SampleReferences, EscapePartIgnoresCorridor) {
  // The escape leg runs outside the corridor; only the free part is checked.
  const std::vector<Vec3> path{Vec3(-0.5, 0, 0), Vec3(0, 0, 0), Vec3(2, 0, 0)};
  const Polytope sfc = box(Vec3(-0.1, -1, -1), Vec3(1.05, 1, 1));
  const auto refs = sample_references(path, 1, Vec3(-0.5, 0, 0), 0.2, 12, &sfc);
  EXPECT_NEAR(refs[0].x(), -0.5, 1e-12);
  EXPECT_NEAR(refs[3].x(), 0.1, 1e-12);
  EXPECT_NEAR(refs.back().x(), 0.9, 1e-12);
}

TEST(Propagate, TripleIntegratorUnderConstantJerk) {
  MpcState x;
  x.p = Vec3(1, 0, 0);
  x.v = Vec3(0, 1, 0);
  x.a = Vec3(0, 0, 1);
  const double dt = 0.3;
  const Vec3 j(2, -1, 0.5);
  const MpcState y = propagate(x, j, dt);
  EXPECT_TRUE(y.p.isApprox(x.p + x.v * dt + x.a * dt * dt / 2 + j * dt * dt * dt / 6));
  EXPECT_TRUE(y.v.isApprox(x.v + x.a * dt + j * dt * dt / 2));
  EXPECT_TRUE(y.a.isApprox(x.a + j * dt));
}

std::vector<Vec3> constant_refs(const Vec3& p, int n) { return std::vector<Vec3>(n, p); }

TEST(BuildQp, DimensionsAndRowCount) {
  const MpcConfig cfg;
  std::vector<Vec3> refs;
  for (int n = 0; n < 20; ++n) refs.push_back(Vec3(0.1 * (n + 1), 0, 0));
  const Polytope sfc = box(Vec3(-1, -1, -1), Vec3(1.25, 1, 1));
  const MpcQp q = build_qp(refs, MpcState{}, &sfc, cfg);
  EXPECT_EQ(q.qp.num_variables(), 60);
  int eligible = 0;
  for (const auto& r : refs) eligible += sfc.contains(r);
  EXPECT_EQ(eligible, 12);
  EXPECT_EQ(q.qp.num_constraints(), 20 * 18 + 6 * eligible);
  EXPECT_EQ(q.kinematic_rows, 360);
  EXPECT_FALSE(q.slack);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.qp.H);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  EXPECT_THROW(build_qp(constant_refs(Vec3::Zero(), 19), MpcState{}, &sfc, cfg),
               std::invalid_argument);
}

TEST(BuildQp, StartOutsideCorridorAddsSlack) {
  const MpcConfig cfg;
  const Polytope sfc = box(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  MpcState x0;
  x0.p = Vec3(1.2, 0, 0);
  const MpcQp q = build_qp(constant_refs(Vec3::Zero(), 20), x0, &sfc, cfg);
  EXPECT_TRUE(q.slack);
  EXPECT_EQ(q.qp.num_variables(), 61);
  EXPECT_EQ(q.qp.num_constraints(), 360 + 6 * 20 + 1);
}

TEST(BuildQp, ObjectiveMatchesDirectCost) {
  const MpcConfig cfg;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  std::vector<Vec3> refs;
  for (int n = 0; n < 20; ++n) refs.push_back(Vec3(n01(rng), n01(rng), n01(rng)));
  MpcState x0;
  x0.v = Vec3(0.3, -0.2, 0.1);
  const MpcQp q = build_qp(refs, x0, nullptr, cfg);
  const auto cost_of = [&](const Eigen::VectorXd& U) {
    std::vector<Vec3> j;
    for (int n = 0; n < 20; ++n) j.push_back(U.segment<3>(3 * n));
    return mpc_cost(refs, x0, j, cfg);
  };
  const Eigen::VectorXd U0 = Eigen::VectorXd::Zero(60);
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd U(60);
    for (int i = 0; i < 60; ++i) U(i) = 5 * n01(rng);
    // Equal up to the constant dropped from the condensed objective.
    const double lhs = cost_of(U) - cost_of(U0);
    const double rhs = q.qp.objective(U) - q.qp.objective(U0);
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(SolveMpc, EffortOnlyGivesZeroInput) {
  MpcConfig cfg;
  cfg.R_p.setZero();
  cfg.R_c.setZero();
  cfg.R_v_terminal.setZero();
  cfg.R_a_terminal.setZero();
  cfg.R_u.setIdentity();
  MpcController c(cfg);
  const auto sol = c.solve(constant_refs(Vec3(3, -2, 1), cfg.horizon), MpcState{}, nullptr);
  ASSERT_EQ(sol.status, MpcStatus::Solved);
  for (const auto& j : sol.jerks) EXPECT_LT(j.norm(), 1e-5);
}

TEST(SolveMpc, EquilibriumStaysPut) {
  const MpcConfig cfg;
  MpcController c(cfg);
  MpcState x0;
  x0.p = Vec3(1, 2, 3);
  const Polytope sfc = box(Vec3(0, 1, 2), Vec3(2, 3, 4));
  const auto sol = c.solve(constant_refs(x0.p, cfg.horizon), x0, &sfc);
  ASSERT_EQ(sol.status, MpcStatus::Solved);
  for (const auto& j : sol.jerks) EXPECT_LT(j.norm(), 1e-4);
  EXPECT_LE(sol.max_violation, 1e-4);
}

TEST(SolveMpc, StepSaturatesJerkLikeTheDenseOracle) {
  MpcConfig cfg;
  cfg.j_max = Vec3(5, 5, 5);
  MpcController c(cfg);
  const auto refs = constant_refs(Vec3(1, 0, 0), cfg.horizon);
  const auto sol = c.solve(refs, MpcState{}, nullptr);
  ASSERT_EQ(sol.status, MpcStatus::Solved);
  const auto ref = oracle::solve_mpc_dense(refs, MpcState{}, nullptr, cfg);
  ASSERT_TRUE(ref.converged);
  EXPECT_NEAR(ref.jerks[0].x(), 5.0, 1e-6);
  EXPECT_NEAR(sol.jerks[0].x(), 5.0, 1e-4);
  for (int n = 0; n < cfg.horizon; ++n) {
    EXPECT_LE((sol.jerks[n] - ref.jerks[n]).lpNorm<Eigen::Infinity>(), 1e-4) << n;
  }
}

TEST(SolveMpc, CorridorWallHolds) {
  const MpcConfig cfg;
  MpcController c(cfg);
  MpcState x0;
  x0.v = Vec3(1.5, 0, 0);
  // References run out to 0.6 m; the wall stands 0.3 m beyond the nearest.
  std::vector<Vec3> refs;
  for (int n = 0; n < cfg.horizon; ++n) refs.push_back(Vec3(std::min(0.075 * (n + 1), 0.6), 0, 0));
  const Polytope sfc = box(Vec3(-1, -1, -1), Vec3(0.375, 1, 1));
  const auto sol = c.solve(refs, x0, &sfc);
  ASSERT_NE(sol.status, MpcStatus::Infeasible);
  const MpcQp q = build_qp(refs, x0, &sfc, cfg);
  for (int n = 0; n < cfg.horizon; ++n) {
    if (!q.corridor_stage[n]) continue;
    EXPECT_LE(sfc.violation(sol.states[n].p), 1e-4) << n;
  }
  EXPECT_LE(sol.max_violation, 1e-4);
}

TEST(SolveMpc, SmallInstancesMatchDenseOracle) {
  MpcConfig cfg;
  cfg.horizon = 5;
  MpcController c(cfg);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    MpcState x0;
    x0.v = 0.5 * Vec3(n01(rng), n01(rng), n01(rng));
    x0.a = 0.5 * Vec3(n01(rng), n01(rng), n01(rng));
    std::vector<Vec3> refs;
    Vec3 r = Vec3::Zero();
    const Vec3 step = 0.1 * Vec3(n01(rng), n01(rng), n01(rng));
    for (int n = 0; n < 5; ++n) refs.push_back(r += step);
    const Polytope sfc = box(-Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)));
    c.reset();
    const auto sol = c.solve(refs, x0, &sfc);
    ASSERT_EQ(sol.status, MpcStatus::Solved) << trial;
    const auto ref = oracle::solve_mpc_dense(refs, x0, &sfc, cfg);
    ASSERT_TRUE(ref.converged) << trial;
    for (int n = 0; n < 5; ++n) {
      EXPECT_LE((sol.jerks[n] - ref.jerks[n]).lpNorm<Eigen::Infinity>(), 1e-4)
          << "trial " << trial << " stage " << n;
    }
  }
}

std::vector<double> closed_loop_error(const MpcConfig& cfg, int steps) {
  MpcController c(cfg);
  MpcState x;
  x.p = Vec3(0.3, -0.2, 0.1);
  const auto refs = constant_refs(Vec3::Zero(), cfg.horizon);
  std::vector<double> err{x.p.norm()};
  for (int k = 0; k < steps; ++k) {
    const auto sol = c.solve(refs, x, nullptr);
    EXPECT_EQ(sol.status, MpcStatus::Solved);
    x = propagate(x, sol.jerks[0], 0.01);
    err.push_back(x.p.norm());
  }
  return err;
}

TEST(SolveMpc, DampedWeightsSettleMonotonically) {
  MpcConfig cfg;
  cfg.R_p = Eigen::Matrix3d::Identity();
  cfg.R_c = Eigen::Matrix3d::Identity();
  const auto err = closed_loop_error(cfg, 1500);
  for (std::size_t k = 5; k + 1 < err.size(); ++k) {
    ASSERT_LE(err[k + 1], err[k] + 1e-6) << "step " << k;
  }
  EXPECT_LT(err.back(), 0.05 * err.front());
}

TEST(SolveMpc, DefaultWeightsSettleWithBoundedOvershoot) {
  // Position is penalised at every stage but velocity only at the end, so the
  // stiff defaults pass through the reference once before settling.
  const MpcConfig cfg;
  const auto err = closed_loop_error(cfg, 400);
  const double late_peak = *std::max_element(err.begin() + 100, err.end());
  EXPECT_LT(late_peak, 0.15 * err.front());
  EXPECT_LT(err.back(), 0.01);
}

TEST(BrakingCommand, OpposesVelocity) {
  const MpcConfig cfg;
  MpcController c(cfg);
  MpcState x;
  x.v = Vec3(1, 0, 0);
  const AttitudeCommand cmd = c.braking_command(x, 0.0, 0.0);
  // Throttle covers gravity plus the braking deceleration.
  EXPECT_NEAR(cmd.throttle, cfg.throttle_coeff * std::hypot(2.0, cfg.gravity), 1e-12);
  MpcSolution failed;
  failed.status = MpcStatus::Degraded;
  const AttitudeCommand fb = c.command(failed, x, 0.0, 0.0);
  EXPECT_EQ(fb.throttle, cmd.throttle);
}

constexpr double kG = 9.81;
constexpr double kCt = 0.03;

TEST(Flatness, HoverIdentity) {
  const auto cmd = flatness_transform(Vec3::Zero(), Vec3::Zero(), 0.3, 0.3, kCt, kG);
  ASSERT_TRUE(cmd);
  EXPECT_EQ(cmd->p_r, 0.0);
  EXPECT_EQ(cmd->q_r, 0.0);
  EXPECT_EQ(cmd->r_r, 0.0);
  EXPECT_NEAR(cmd->throttle, kCt * kG, 1e-15);
}

TEST(Flatness, ForwardJerkPitches) {
  const auto cmd = flatness_transform(Vec3::Zero(), Vec3(1, 0, 0), 0.0, 0.0, kCt, kG);
  ASSERT_TRUE(cmd);
  EXPECT_NEAR(cmd->q_r, 1.0 / 9.81, 1e-12);
  EXPECT_NEAR(cmd->q_r, 0.1019, 5e-5);
  EXPECT_NEAR(cmd->p_r, 0.0, 1e-15);
}

TEST(Flatness, YawErrorDrivesYawRate) {
  const auto cmd = flatness_transform(Vec3::Zero(), Vec3::Zero(), 0.1, 0.3, kCt, kG);
  ASSERT_TRUE(cmd);
  EXPECT_NEAR(cmd->r_r, 0.2, 1e-12);
  // The error is wrapped: 3.0 -> -3.0 is a short turn through pi.
  const auto wrap = flatness_transform(Vec3::Zero(), Vec3::Zero(), 3.0, -3.0, kCt, kG);
  EXPECT_NEAR(wrap->r_r, 2 * std::numbers::pi - 6.0, 1e-12);
}

TEST(Flatness, FreeFallIsRejected) {
  EXPECT_FALSE(flatness_transform(Vec3(0, 0, -kG), Vec3::Zero(), 0.0, 0.0, kCt, kG));
}

TEST(Flatness, FrameIsOrthonormalRightHanded) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> yaw(-3.1, 3.1);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 a = 4.0 * Vec3(n01(rng), n01(rng), n01(rng));
    const auto f = desired_body_frame(a, yaw(rng), kG);
    if (!f) continue;
    Eigen::Matrix3d R;
    R << f->x_b, f->y_b, f->z_b;
    ASSERT_LT((R.transpose() * R - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    ASSERT_NEAR(R.determinant(), 1.0, 1e-12);
    ASSERT_TRUE(f->z_b.isApprox((a + kG * Vec3::UnitZ()).normalized(), 1e-12));
  }
}

Eigen::Matrix3d frame_matrix(const Vec3& a, double yaw) {
  const auto f = desired_body_frame(a, yaw, kG);
  Eigen::Matrix3d R;
  R << f->x_b, f->y_b, f->z_b;
  return R;
}

TEST(Flatness, RatesMatchFiniteDifferenceOfFrame) {
  // Smooth trajectory with analytic acceleration and jerk; fixed heading.
  const auto acc = [](double t) {
    return Vec3(2 * std::sin(1.3 * t), 1.5 * std::cos(0.7 * t), 0.8 * std::sin(2.1 * t));
  };
  const auto jerk = [](double t) {
    return Vec3(2.6 * std::cos(1.3 * t), -1.05 * std::sin(0.7 * t), 1.68 * std::cos(2.1 * t));
  };
  const double yaw = 0.4, h = 1e-4;
  for (double t = 0.0; t < 5.0; t += 0.05) {
    const auto cmd = flatness_transform(acc(t), jerk(t), yaw, yaw, kCt, kG);
    ASSERT_TRUE(cmd);
    const Eigen::Matrix3d R = frame_matrix(acc(t), yaw);
    const Eigen::Matrix3d Rdot = (frame_matrix(acc(t + h), yaw) - frame_matrix(acc(t - h), yaw)) / (2 * h);
    const Eigen::Matrix3d W = R.transpose() * Rdot;
    EXPECT_NEAR(cmd->p_r, W(2, 1), 1e-3) << t;
    EXPECT_NEAR(cmd->q_r, W(0, 2), 1e-3) << t;
    EXPECT_NEAR(cmd->throttle, kCt * (acc(t) + kG * Vec3::UnitZ()).norm(), 1e-12);
  }
}

}  // namespace
