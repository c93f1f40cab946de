#include <cmath>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "canopy/sim/lidar.hpp"
#include "canopy/sim/plant.hpp"
#include "canopy/sim/world.hpp"

namespace {

using namespace canopy;
using namespace canopy::sim;

WorldSpec no_ground() {
  WorldSpec s;
  s.ground = false;
  return s;
}

TEST(GenerateWorld, EmptySpecIsHeightfieldOnly) {
  const WorldModel w = generate_world(WorldSpec{}, 17);
  ASSERT_EQ(w.primitives.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<Heightfield>(w.primitives[0]));
  EXPECT_EQ(w.count_capsules(), 0u);
}

TEST(GenerateWorld, SameSeedSamePrimitives) {
  WorldSpec s;
  s.branch_density = 0.05;
  s.terrain_amplitude = 0.5;
  const WorldModel a = generate_world(s, 5), b = generate_world(s, 5);
  ASSERT_EQ(a.primitives.size(), b.primitives.size());
  for (std::size_t i = 0; i < a.primitives.size(); ++i) {
    if (const auto* ca = std::get_if<Capsule>(&a.primitives[i])) {
      const auto& cb = std::get<Capsule>(b.primitives[i]);
      EXPECT_EQ(ca->a, cb.a);
      EXPECT_EQ(ca->b, cb.b);
      EXPECT_EQ(ca->radius, cb.radius);
    }
  }
  // Bitwise-equal geometry answers the same queries.
  for (const Vec3& p : {Vec3(1, 2, 3), Vec3(-7, 4, 0.5), Vec3(0, 0, 9)}) {
    EXPECT_EQ(a.distance(p), b.distance(p));
  }
}

TEST(GenerateWorld, BranchCountFollowsDensityTimesArea) {
  WorldSpec s;
  s.bounds = Aabb{Vec3(0, 0, 0), Vec3(10, 10, 5)};
  s.branch_density = 0.5;
  EXPECT_EQ(generate_world(s, 3).count_capsules(), 50u);
}

TEST(GenerateWorld, BranchesStayInBounds) {
  WorldSpec s;
  s.bounds = Aabb{Vec3(-5, -5, 0), Vec3(5, 5, 4)};
  s.ground = false;
  s.branch_density = 1.0;
  const WorldModel w = generate_world(s, 11);
  for (const auto& prim : w.primitives) {
    const auto& c = std::get<Capsule>(prim);
    for (const Vec3& e : {c.a, c.b}) {
      EXPECT_TRUE((e.array() >= s.bounds.min.array() + c.radius - 1e-12).all());
      EXPECT_TRUE((e.array() <= s.bounds.max.array() - c.radius + 1e-12).all());
    }
  }
}

TEST(GenerateWorld, RejectsNegativeDimensions) {
  WorldSpec s;
  s.branch_density = -1.0;
  EXPECT_THROW(generate_world(s, 1), std::invalid_argument);
  WorldSpec t;
  t.capsules.push_back(Capsule{Vec3::Zero(), Vec3::UnitX(), -0.1});
  EXPECT_THROW(generate_world(t, 1), std::invalid_argument);
  WorldSpec u;
  u.bounds = Aabb{Vec3::Zero(), Vec3(1, 0, 1)};
  EXPECT_THROW(generate_world(u, 1), std::invalid_argument);
}

TEST(WorldDistance, CapsuleOffsetByHalfMeter) {
  WorldSpec s = no_ground();
  s.capsules.push_back(Capsule{Vec3(0, 0, -5), Vec3(0, 0, 5), 0.05});
  const WorldModel w = generate_world(s, 0);
  EXPECT_NEAR(w.distance(Vec3(0.5, 0, 1)), 0.45, 1e-12);
}

TEST(WorldDistance, EmptyWorldIsInfinite) {
  EXPECT_TRUE(std::isinf(generate_world(no_ground(), 0).distance(Vec3::Zero())));
}

TEST(WorldDistance, MovingSphere) {
  WorldSpec s = no_ground();
  s.spheres.push_back(Sphere{Vec3(5, 0, 0), Vec3(-1, 0, 0), 0.5});
  const WorldModel w = generate_world(s, 0);
  EXPECT_NEAR(w.distance(Vec3::Zero(), 0.0), 4.5, 1e-12);
  EXPECT_NEAR(w.distance(Vec3::Zero(), 2.0), 2.5, 1e-12);
}

TEST(WorldRaycast, AgreesWithDistanceAlongRay) {
  WorldSpec s;
  s.bounds = Aabb{Vec3(-8, -8, -1), Vec3(8, 8, 6)};
  s.branch_density = 0.3;
  s.terrain_amplitude = 0.4;
  s.nets.push_back(Net{Vec3(3, -2, 0), Vec3(0, 4, 0), Vec3(0, 0, 3), 0.01, 0.2});
  const WorldModel w = generate_world(s, 21);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  int hits = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 o(0, 0, 2.5);
    if (w.distance(o) == 0.0) break;
    const Vec3 d = Vec3(n01(rng), n01(rng), n01(rng)).normalized();
    const auto r = w.raycast(o, d, 20.0);
    if (!r) continue;
    ++hits;
    // The hit point lies on a surface, and nothing is closer along the ray.
    EXPECT_LT(w.distance(o + d * *r), 1e-6);
    EXPECT_GT(w.distance(o + d * (*r * 0.5)), 0.0);
  }
  EXPECT_GT(hits, 100);
}

TEST(NearBlind, RampShape) {
  EXPECT_DOUBLE_EQ(near_blind_ratio(0.1), 0.8);
  EXPECT_NEAR(near_blind_ratio(1.0 - 1e-12), 0.1, 1e-9);
  EXPECT_DOUBLE_EQ(near_blind_ratio(1.0), 0.0);
  EXPECT_DOUBLE_EQ(near_blind_ratio(5.0), 0.0);
  double prev = near_blind_ratio(0.1);
  for (double d = 0.1; d <= 1.0; d += 0.01) {
    EXPECT_LE(near_blind_ratio(d), prev + 1e-15);
    prev = near_blind_ratio(d);
  }
}

TEST(SampleScan, UpwardRaysOverDistantGroundAreInvalid) {
  WorldSpec s;
  s.ground_base = -30.0;
  s.bounds = Aabb{Vec3(-50, -50, -31), Vec3(50, 50, 10)};
  const WorldModel w = generate_world(s, 0);
  std::mt19937_64 rng(1);
  LidarConfig cfg;
  cfg.points_per_scan = 2000;
  const LidarScan scan = sample_scan(w, make_plant_state(Vec3::Zero(), 0.0), 0.0, rng, cfg);
  int up = 0;
  for (const auto& pt : scan.points) {
    if (pt.direction.z() > 0.0) {
      ++up;
      EXPECT_FALSE(pt.valid());
    }
  }
  EXPECT_GT(up, 500);
}

TEST(SampleScan, WallAtFiveMetersWithoutNoise) {
  WorldSpec s = no_ground();
  s.boxes.push_back(Box{Aabb{Vec3(5, -10, -10), Vec3(6, 10, 10)}});
  const WorldModel w = generate_world(s, 0);
  std::mt19937_64 rng(1);
  LidarConfig cfg;
  cfg.range_sigma = 0.0;
  const LidarPoint p = sample_ray(w, Vec3::Zero(), Vec3::UnitX(), 0.0, rng, cfg);
  ASSERT_TRUE(p.valid());
  EXPECT_DOUBLE_EQ(*p.range, 5.0);
}

TEST(SampleScan, GeometryInvariants) {
  WorldSpec s;
  s.bounds = Aabb{Vec3(-10, -10, -1), Vec3(10, 10, 6)};
  s.branch_density = 0.4;
  const WorldModel w = generate_world(s, 8);
  std::mt19937_64 rng(2);
  LidarConfig cfg;
  PlantState pose = make_plant_state(Vec3(0.3, -0.2, 1.5), 0.7);
  pose.attitude = pose.attitude * Eigen::AngleAxisd(0.2, Vec3::UnitX()).toRotationMatrix();
  const LidarScan scan = sample_scan(w, pose, 1.0, rng, cfg);
  ASSERT_EQ(static_cast<int>(scan.points.size()), cfg.points_per_scan);
  const double max_sin = std::sin(cfg.elevation_half_fov) + 1e-12;
  for (const auto& pt : scan.points) {
    EXPECT_NEAR(pt.direction.norm(), 1.0, 1e-12);
    const Vec3 body = pose.attitude.transpose() * pt.direction;
    EXPECT_LE(std::abs(body.z()), max_sin);
    if (!pt.valid()) continue;
    EXPECT_GT(*pt.range, 0.0);
    EXPECT_LE(*pt.range, cfg.max_range);
    const auto truth = w.raycast(scan.origin, pt.direction, cfg.max_range);
    ASSERT_TRUE(truth.has_value());
    EXPECT_LE(std::abs(*pt.range - *truth), 4.0 * cfg.range_sigma + 1e-12);
  }
}

TEST(SampleScan, NearBlindRatioMatchesRamp) {
  WorldSpec s = no_ground();
  s.boxes.push_back(Box{Aabb{Vec3(0, -5, -5), Vec3(0.01, 5, 5)}});
  LidarConfig cfg;
  std::mt19937_64 rng(9);
  constexpr int kRays = 100000;
  const WorldModel w = generate_world(s, 0);
  for (int step = 1; step <= 9; ++step) {
    const double d = 0.1 * step;
    const Vec3 origin(-d, 0, 0);
    int invalid = 0;
    for (int i = 0; i < kRays; ++i) {
      invalid += !sample_ray(w, origin, Vec3::UnitX(), 0.0, rng, cfg).valid();
    }
    const double p = near_blind_ratio(d);
    const double sigma = std::sqrt(p * (1 - p) / kRays);
    EXPECT_NEAR(double(invalid) / kRays, p, 3 * sigma + 1e-12) << "d = " << d;
  }
}

constexpr double kDt = 1e-3;

TEST(Plant, HoverIsFixedPoint) {
  PlantConfig cfg;
  const PlantState s0 = make_plant_state(Vec3(1, 2, 3), 0.4);
  PlantState s = s0;
  const mpc::AttitudeCommand hover{0, 0, 0, cfg.throttle_coeff * cfg.gravity};
  for (int i = 0; i < 1000; ++i) s = step_plant(s, hover, Vec3::Zero(), kDt, cfg);
  EXPECT_LT((s.p - s0.p).norm(), 1e-9);
  EXPECT_LT(s.v.norm(), 1e-9);
  EXPECT_LT((s.attitude - s0.attitude).norm(), 1e-12);
  EXPECT_NEAR(s.t_sim, 1.0, 1e-9);
  EXPECT_FALSE(s.fault);
}

TEST(Plant, DoubleThrustClimbs) {
  PlantConfig cfg;
  PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  const mpc::AttitudeCommand cmd{0, 0, 0, 2 * cfg.throttle_coeff * cfg.gravity};
  for (int i = 0; i < 1000; ++i) s = step_plant(s, cmd, Vec3::Zero(), kDt, cfg);
  EXPECT_NEAR(s.v.z(), 9.81, 1e-9);
  EXPECT_NEAR(s.accel.z(), 9.81, 1e-9);
}

TEST(Plant, ConstantWind) {
  PlantConfig cfg;
  PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  const mpc::AttitudeCommand hover{0, 0, 0, cfg.throttle_coeff * cfg.gravity};
  for (int i = 0; i < 1000; ++i) s = step_plant(s, hover, Vec3(1, 0, 0), kDt, cfg);
  EXPECT_NEAR(s.v.x(), 1.0, 1e-9);
}

TEST(Plant, FreeFallWithoutThrust) {
  PlantConfig cfg;
  PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  s.v.z() = 2.0;
  for (int i = 1; i <= 500; ++i) {
    s = step_plant(s, mpc::AttitudeCommand{}, Vec3::Zero(), kDt, cfg);
    EXPECT_NEAR(s.v.z(), 2.0 - cfg.gravity * i * kDt, 1e-9);
  }
}

TEST(Plant, RejectsBadCommands) {
  PlantConfig cfg;
  const PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  EXPECT_TRUE(step_plant(s, {std::nan(""), 0, 0, 0.3}, Vec3::Zero(), kDt, cfg).fault);
  EXPECT_TRUE(step_plant(s, {0, 0, 0, -0.1}, Vec3::Zero(), kDt, cfg).fault);
  EXPECT_TRUE(step_plant(s, {0, 0, 0, INFINITY}, Vec3::Zero(), kDt, cfg).fault);
}

TEST(Plant, AttitudeStaysARotation) {
  PlantConfig cfg;
  PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  double t_prev = s.t_sim;
  for (int i = 0; i < 5000; ++i) {
    s = step_plant(s, {u(rng), u(rng), u(rng), 0.3}, Vec3::Zero(), kDt, cfg);
    ASSERT_GE(s.t_sim, t_prev);
    t_prev = s.t_sim;
  }
  EXPECT_LT((s.attitude.transpose() * s.attitude - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_NEAR(s.attitude.determinant(), 1.0, 1e-12);
}

TEST(Plant, RatesFollowFirstOrderLag) {
  PlantConfig cfg;
  PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  const mpc::AttitudeCommand cmd{1.0, 0, 0, cfg.throttle_coeff * cfg.gravity};
  const int steps = static_cast<int>(cfg.tau_omega / kDt);
  for (int i = 0; i < steps; ++i) s = step_plant(s, cmd, Vec3::Zero(), kDt, cfg);
  // One time constant: 1 - 1/e of the step, up to discretization.
  EXPECT_NEAR(s.omega.x(), 1.0 - std::exp(-1.0), 0.01);
}

TEST(Plant, IdenticalInputsIdenticalTrajectory) {
  PlantConfig cfg;
  PlantState a = make_plant_state(Vec3::Zero(), 0.1), b = a;
  for (int i = 0; i < 2000; ++i) {
    const mpc::AttitudeCommand cmd{std::sin(i * 0.01), std::cos(i * 0.02), 0.1, 0.3 + 0.01 * std::sin(i * 0.005)};
    a = step_plant(a, cmd, Vec3(0.1, 0, 0), kDt, cfg);
    b = step_plant(b, cmd, Vec3(0.1, 0, 0), kDt, cfg);
  }
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.attitude, b.attitude);
}

TEST(Odometry, NoiseOffIsExact) {
  PlantState s = make_plant_state(Vec3(1, 2, 3), 0.5);
  s.v = Vec3(0.1, 0.2, 0.3);
  s.accel = Vec3(0.5, 0, -0.1);
  std::mt19937_64 rng(0);
  const Odometry o = read_odometry(s, OdometryNoise{}, rng);
  EXPECT_EQ(o.p, s.p);
  EXPECT_EQ(o.v, s.v);
  EXPECT_EQ(o.a, s.accel);
  EXPECT_NEAR(o.yaw, 0.5, 1e-12);
}

TEST(Odometry, PositionNoiseStd) {
  const PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  std::mt19937_64 rng(5);
  OdometryNoise noise;
  noise.sigma_p = 0.01;
  double sum = 0.0, sum2 = 0.0;
  constexpr int kN = 10000;
  for (int i = 0; i < kN; ++i) {
    const double x = read_odometry(s, noise, rng).p.x();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / kN;
  const double sd = std::sqrt(sum2 / kN - mean * mean);
  EXPECT_NEAR(sd, 0.01, 0.001);
}

TEST(Odometry, HoverAccelerationIsZero) {
  PlantConfig cfg;
  PlantState s = make_plant_state(Vec3::Zero(), 0.0);
  s = step_plant(s, {0, 0, 0, cfg.throttle_coeff * cfg.gravity}, Vec3::Zero(), kDt, cfg);
  std::mt19937_64 rng(0);
  EXPECT_LT(read_odometry(s, OdometryNoise{}, rng).a.norm(), 1e-12);
}

}  // namespace
