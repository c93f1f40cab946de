#pragma once

#include <optional>

#include "canopy/common/geometry.hpp"

namespace canopy::mpc {

/// Body-rate reference (rad/s) and throttle for the autopilot's rate loop.
struct AttitudeCommand {
  double p_r = 0.0;  // about body x
  double q_r = 0.0;  // about body y
  double r_r = 0.0;  // about body z
  double throttle = 0.0;
};

struct BodyFrame {
  Vec3 x_b, y_b, z_b;
};

/// Desired body axes for thrust direction t = a + g e_z and heading yaw.
/// nullopt if |t| <= eps or z_b is parallel to the heading vector.
std::optional<BodyFrame> desired_body_frame(const Vec3& a, double yaw, double gravity,
                                            double eps = 1e-6);

/// Differential-flatness map from (a, j, yaw, yaw_ref) to body rates and
/// throttle = C_T |t|. The jerk projection is normalized by |t|, the thrust
/// acceleration norm, so hover is regular. The yaw rate is the wrapped yaw
/// error scaled by z_b . e_z. Returns nullopt in free fall (|t| <= eps).
std::optional<AttitudeCommand> flatness_transform(const Vec3& a, const Vec3& j, double yaw,
                                                  double yaw_ref, double throttle_coeff,
                                                  double gravity = 9.81, double eps = 1e-6);

}  // namespace canopy::mpc
