#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "canopy/sim/world.hpp"

namespace canopy::harness {

struct TrajectorySample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// Minimum over samples of the exact center-to-surface distance, evaluated
/// at each sample's time (moving primitives). +inf for an empty world or
/// trajectory.
double min_clearance(const std::vector<TrajectorySample>& trajectory, const sim::WorldModel& world);

struct Percentiles {
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Nearest-rank percentiles; all zero for an empty sample.
Percentiles percentiles(std::vector<double> samples);

struct Metrics {
  double min_clearance = 0.0;  // +inf when nothing is in range
  double mean_speed = 0.0;
  double max_speed = 0.0;
  double path_length = 0.0;
  bool completed = false;
  bool fault = false;             // plant rejected a command
  bool safety_violation = false;  // fault, or clearance at or below the threshold
  int mpc_solved = 0;
  int mpc_degraded = 0;
  int mpc_infeasible = 0;
  int hold_ticks = 0;      // joystick ticks spent holding position
  int escape_ticks = 0;    // joystick ticks with a non-empty escape segment
  std::map<std::string, Percentiles> timing;  // wall-clock seconds per module
};

/// Speed and length statistics from the trajectory.
void fill_motion_metrics(Metrics& m, const std::vector<TrajectorySample>& trajectory);

/// +inf is written as the string "inf".
nlohmann::json number_or_inf(double v);
double parse_number_or_inf(const nlohmann::json& j);

/// Deterministic fields only; timing is left out unless requested since it
/// depends on the host.
nlohmann::json metrics_to_json(const Metrics& m, bool include_timing = false);

}  // namespace canopy::harness
