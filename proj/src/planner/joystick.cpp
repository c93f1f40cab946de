#include "canopy/planner/joystick.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace canopy::planner {

std::optional<LocalGoal> joystick_to_goal(const JoystickCommand& cmd, const Odometry& odom,
                                          double dt) {
  if (!(dt > 0.0) || !cmd.v_joy.allFinite() || !std::isfinite(cmd.w_yaw) ||
      !odom.p.allFinite() || !std::isfinite(odom.yaw)) {
    return std::nullopt;
  }
  const Eigen::AngleAxisd yaw_frame(odom.yaw, Vec3::UnitZ());
  LocalGoal g;
  g.position = yaw_frame * cmd.v_joy * dt + odom.p;
  g.yaw_ref = wrap_angle(odom.yaw + cmd.w_yaw * dt);
  return g;
}

LocalGoal GoalTracker::update(const JoystickCommand& cmd, const Odometry& odom, double dt) {
  JoystickCommand limited = cmd;
  const double speed = cmd.v_joy.norm();
  if (std::isfinite(speed) && speed > max_speed_) limited.v_joy *= max_speed_ / speed;
  if (auto g = joystick_to_goal(limited, odom, dt)) {
    last_ = *g;
  } else {
    ++rejected_;
    if (!last_) last_ = LocalGoal{odom.p, wrap_angle(odom.yaw)};
  }
  return *last_;
}

}  // namespace canopy::planner
