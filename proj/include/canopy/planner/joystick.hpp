#pragma once

#include <optional>

#include "canopy/common/sensor_types.hpp"

namespace canopy::planner {

/// Pilot input: velocity in the yaw frame (m/s) and yaw rate (rad/s).
struct JoystickCommand {
  Vec3 v_joy = Vec3::Zero();
  double w_yaw = 0.0;
  double stamp = 0.0;
};

struct LocalGoal {
  Vec3 position = Vec3::Zero();
  double yaw_ref = 0.0;  // (-pi, pi]
};

/// p_g = R_z(yaw) * v_joy * dt + p_odom and yaw_ref = wrap(yaw + w_yaw * dt).
/// Returns nullopt for non-finite input or dt <= 0.
std::optional<LocalGoal> joystick_to_goal(const JoystickCommand& cmd, const Odometry& odom,
                                          double dt);

/// Keeps the last accepted goal so that rejected commands do not move it.
class GoalTracker {
 public:
  explicit GoalTracker(double max_speed = 2.0) : max_speed_(max_speed) {}

  /// Speeds above max_speed are scaled down to it.
  LocalGoal update(const JoystickCommand& cmd, const Odometry& odom, double dt);
  const std::optional<LocalGoal>& last() const { return last_; }
  int rejected() const { return rejected_; }

 private:
  double max_speed_;
  std::optional<LocalGoal> last_;
  int rejected_ = 0;
};

}  // namespace canopy::planner
