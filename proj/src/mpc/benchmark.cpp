#include "canopy/mpc/benchmark.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace canopy::mpc {

std::vector<MpcInstance> benchmark_sequence(int count, const MpcConfig& cfg, std::uint64_t seed,
                                            double control_period) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double speed = 0.5 + u(rng);     // m/s
  const double amp = 0.2 + 0.6 * u(rng);  // lateral weave, m
  const double freq = 0.2 + 0.3 * u(rng);
  const double omega = 2.0 * std::numbers::pi * freq;
  const auto pos = [&](double t) {
    return Vec3(speed * t, amp * std::sin(omega * t), 1.0 + 0.2 * amp * std::sin(0.5 * omega * t));
  };
  const auto vel = [&](double t) {
    return Vec3(speed, amp * omega * std::cos(omega * t),
                0.1 * amp * omega * std::cos(0.5 * omega * t));
  };
  const auto acc = [&](double t) {
    return Vec3(0.0, -amp * omega * omega * std::sin(omega * t),
                -0.05 * amp * omega * omega * std::sin(0.5 * omega * t));
  };

  std::vector<MpcInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double t = k * control_period;
    MpcInstance inst;
    inst.x0.p = pos(t);
    inst.x0.v = vel(t);
    inst.x0.a = acc(t);
    for (int n = 0; n < cfg.horizon; ++n) inst.refs.push_back(pos(t + (n + 1) * cfg.dt));
    // Corridor: a box around the current position, tight laterally so that
    // corridor rows become active.
    const Vec3 c = pos(t);
    const Vec3 lo = c - Vec3(0.5, amp + 0.15, 0.4);
    const Vec3 hi = c + Vec3(3.0, amp + 0.15, 0.4);
    for (int i = 0; i < 3; ++i) {
      inst.sfc.add(Vec3::Unit(i), hi(i));
      inst.sfc.add(-Vec3::Unit(i), -lo(i));
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace canopy::mpc
