#include "canopy/mpc/flatness.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace canopy::mpc {

std::optional<BodyFrame> desired_body_frame(const Vec3& a, double yaw, double gravity, double eps) {
  const Vec3 t(a.x(), a.y(), a.z() + gravity);
  const double t_norm = t.norm();
  if (!(t_norm > eps)) return std::nullopt;
  BodyFrame f;
  f.z_b = t / t_norm;
  const Vec3 x_c(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 y = f.z_b.cross(x_c);
  const double y_norm = y.norm();
  if (!(y_norm > eps)) return std::nullopt;
  f.y_b = y / y_norm;
  f.x_b = f.y_b.cross(f.z_b);
  return f;
}

std::optional<AttitudeCommand> flatness_transform(const Vec3& a, const Vec3& j, double yaw,
                                                  double yaw_ref, double throttle_coeff,
                                                  double gravity, double eps) {
  if (!a.allFinite() || !j.allFinite() || !std::isfinite(yaw) || !std::isfinite(yaw_ref)) {
    return std::nullopt;
  }
  const auto frame = desired_body_frame(a, yaw, gravity, eps);
  if (!frame) return std::nullopt;
  const double t_norm = Vec3(a.x(), a.y(), a.z() + gravity).norm();
  const Vec3 h_w = (j - frame->z_b.dot(j) * frame->z_b) / t_norm;

  AttitudeCommand cmd;
  cmd.p_r = -h_w.dot(frame->y_b);
  cmd.q_r = h_w.dot(frame->x_b);
  cmd.r_r = wrap_angle(yaw_ref - yaw) * frame->z_b.z();
  cmd.throttle = throttle_coeff * t_norm;
  return cmd;
}

}  // namespace canopy::mpc
