#pragma once

#include <Eigen/Core>

#include "canopy/common/geometry.hpp"

namespace canopy::mpc {

struct MpcConfig {
  int horizon = 20;
  double dt = 0.05;

  Eigen::Matrix3d R_p = 2000.0 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R_u = 0.1 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R_c = 0.1 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R_v_terminal = 10.0 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R_a_terminal = 1.0 * Eigen::Matrix3d::Identity();

  Vec3 v_max{2.0, 2.0, 2.0};
  double a_max_xy = 6.0;
  double a_z_min = -5.0;
  double a_z_max = 14.0;
  Vec3 j_max{60.0, 60.0, 60.0};

  double v_ref = 1.5;          // reference speed along the path
  double throttle_coeff = 0.03;  // C_T: throttle per m/s^2 of thrust acceleration
  double gravity = 9.81;
  double brake_gain = 2.0;       // k_v of the braking fallback, 1/s
  double slack_weight = 1e4;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct MpcState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

}  // namespace canopy::mpc
