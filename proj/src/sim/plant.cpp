#include "canopy/sim/plant.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace canopy::sim {

Vec3 WindConfig::at(double t) const {
  return bias + gust_amplitude * std::sin(2.0 * std::numbers::pi * gust_frequency * t);
}

double PlantState::yaw() const { return std::atan2(attitude(1, 0), attitude(0, 0)); }

PlantState make_plant_state(const Vec3& p, double yaw) {
  PlantState s;
  s.p = p;
  s.attitude = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  return s;
}

PlantState step_plant(const PlantState& s, const mpc::AttitudeCommand& cmd, const Vec3& wind,
                      double dt, const PlantConfig& cfg) {
  const bool finite = std::isfinite(cmd.p_r) && std::isfinite(cmd.q_r) &&
                      std::isfinite(cmd.r_r) && std::isfinite(cmd.throttle) && wind.allFinite();
  if (!finite || cmd.throttle < 0.0 || !(dt > 0.0)) {
    PlantState out = s;
    out.fault = true;
    return out;
  }
  PlantState n = s;
  const Vec3 omega_cmd(cmd.p_r, cmd.q_r, cmd.r_r);
  n.omega = s.omega + (dt / (cfg.tau_omega + dt)) * (omega_cmd - s.omega);

  const double angle = n.omega.norm() * dt;
  if (angle > 0.0) {
    const Eigen::Matrix3d dR = Eigen::AngleAxisd(angle, n.omega.normalized()).toRotationMatrix();
    n.attitude = s.attitude * dR;
    // Re-orthonormalize against drift.
    const Eigen::Quaterniond q(n.attitude);
    n.attitude = q.normalized().toRotationMatrix();
  }

  const Vec3 z_b = n.attitude.col(2);
  n.accel = (cmd.throttle / cfg.throttle_coeff) * z_b - cfg.gravity * Vec3::UnitZ() + wind;
  n.v = s.v + dt * n.accel;
  n.p = s.p + dt * n.v;
  n.t_sim = s.t_sim + dt;
  return n;
}

Odometry read_odometry(const PlantState& s, const OdometryNoise& noise, std::mt19937_64& rng) {
  Odometry o;
  o.stamp = s.t_sim;
  o.p = s.p;
  o.v = s.v;
  o.a = s.accel;
  o.yaw = s.yaw();
  if (noise.sigma_p > 0.0) {
    std::normal_distribution<double> n(0.0, noise.sigma_p);
    for (int i = 0; i < 3; ++i) o.p(i) += n(rng);
  }
  if (noise.sigma_v > 0.0) {
    std::normal_distribution<double> n(0.0, noise.sigma_v);
    for (int i = 0; i < 3; ++i) o.v(i) += n(rng);
  }
  return o;
}

}  // namespace canopy::sim
