#include "canopy/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace canopy::harness {

double min_clearance(const std::vector<TrajectorySample>& trajectory, const sim::WorldModel& world) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : trajectory) best = std::min(best, world.distance(s.p, s.t));
  return best;
}

Percentiles percentiles(std::vector<double> samples) {
  Percentiles p;
  p.count = samples.size();
  if (samples.empty()) return p;
  std::sort(samples.begin(), samples.end());
  const auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(idx, 1, samples.size()) - 1];
  };
  p.p50 = rank(0.5);
  p.p90 = rank(0.9);
  p.p99 = rank(0.99);
  p.max = samples.back();
  return p;
}

void fill_motion_metrics(Metrics& m, const std::vector<TrajectorySample>& trajectory) {
  m.path_length = 0.0;
  m.max_speed = 0.0;
  double speed_sum = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double speed = trajectory[i].v.norm();
    speed_sum += speed;
    m.max_speed = std::max(m.max_speed, speed);
    if (i > 0) m.path_length += (trajectory[i].p - trajectory[i - 1].p).norm();
  }
  m.mean_speed = trajectory.empty() ? 0.0 : speed_sum / static_cast<double>(trajectory.size());
}

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v) && v > 0.0) return "inf";
  return v;
}

double parse_number_or_inf(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

nlohmann::json metrics_to_json(const Metrics& m, bool include_timing) {
  nlohmann::json j = {
      {"min_clearance", number_or_inf(m.min_clearance)},
      {"mean_speed", m.mean_speed},
      {"max_speed", m.max_speed},
      {"path_length", m.path_length},
      {"completed", m.completed},
      {"fault", m.fault},
      {"safety_violation", m.safety_violation},
      {"mpc_solved", m.mpc_solved},
      {"mpc_degraded", m.mpc_degraded},
      {"mpc_infeasible", m.mpc_infeasible},
      {"hold_ticks", m.hold_ticks},
      {"escape_ticks", m.escape_ticks},
  };
  if (include_timing) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, p] : m.timing) {
      t[name] = {{"p50", p.p50}, {"p90", p.p90}, {"p99", p.p99}, {"max", p.max}, {"count", p.count}};
    }
    j["timing"] = t;
  }
  return j;
}

}  // namespace canopy::harness
