#pragma once

#include <random>

#include <Eigen/Core>

#include "canopy/common/sensor_types.hpp"
#include "canopy/mpc/flatness.hpp"

namespace canopy::sim {

struct PlantConfig {
  double throttle_coeff = 0.03;  // C_T, shared with the controller
  double tau_omega = 0.05;       // rate-loop time constant, s
  double gravity = 9.81;
};

/// World acceleration disturbance: bias + amplitude * sin(2 pi f t).
struct WindConfig {
  Vec3 bias = Vec3::Zero();
  Vec3 gust_amplitude = Vec3::Zero();
  double gust_frequency = 0.0;  // Hz

  Vec3 at(double t) const;
};

struct PlantState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Eigen::Matrix3d attitude = Eigen::Matrix3d::Identity();  // body to world
  Vec3 omega = Vec3::Zero();                                // body rates, rad/s
  Vec3 accel = Vec3::Zero();  // dv/dt of the last step, world frame; zero at hover
  double t_sim = 0.0;
  bool fault = false;

  double yaw() const;
};

PlantState make_plant_state(const Vec3& p, double yaw);

/// One semi-implicit Euler step: rates follow the command through a first
/// order lag, the attitude integrates the new rates, then velocity and
/// position integrate the thrust acceleration. A non-finite or negative
/// command returns the input state with `fault` set.
PlantState step_plant(const PlantState& s, const mpc::AttitudeCommand& cmd, const Vec3& wind,
                      double dt, const PlantConfig& cfg);

struct OdometryNoise {
  double sigma_p = 0.0;
  double sigma_v = 0.0;
};

Odometry read_odometry(const PlantState& s, const OdometryNoise& noise, std::mt19937_64& rng);

}  // namespace canopy::sim
