#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "canopy/map/grid_config.hpp"
#include "canopy/mpc/mpc_config.hpp"
#include "canopy/planner/sfc.hpp"
#include "canopy/qp/admm_solver.hpp"
#include "canopy/sim/lidar.hpp"
#include "canopy/sim/plant.hpp"
#include "canopy/sim/world.hpp"

namespace canopy::harness {

/// Event rates in Hz on the plant clock. Each rate must lie in
/// [1, plant]; a rate r fires exactly r times in every window of `plant`
/// consecutive ticks (see fires_at()).
struct Rates {
  int plant = 1000;
  int odometry = 200;
  int scan = 30;
  int joystick = 10;
  int mpc = 100;
};

/// True if an event of `rate` fires on plant tick k >= 1.
inline bool fires_at(std::int64_t k, int rate, int plant_rate) {
  return (k * rate) / plant_rate != ((k - 1) * rate) / plant_rate;
}

/// Move toward `position` at `speed` until within arrival_radius.
struct Waypoint {
  Vec3 position = Vec3::Zero();
  double speed = 1.0;
};

/// Constant yaw-frame command on [t_begin, t_end).
struct Segment {
  double t_begin = 0.0;
  double t_end = 0.0;
  Vec3 v_joy = Vec3::Zero();
  double w_yaw = 0.0;
};

enum class JoystickKind { Hover, Waypoints, Segments, Recorded, Live };

struct JoystickConfig {
  JoystickKind kind = JoystickKind::Hover;
  std::vector<Waypoint> waypoints;
  double arrival_radius = 0.3;
  std::vector<Segment> segments;
  std::string recorded_path;    // JSONL with {"t", "v", "w_yaw"} per line
  double max_speed = 2.0;       // |v_joy| cap
  double silence_timeout = 0.5; // live source: hover after this much silence, s
};

struct PlannerSettings {
  double beta = 3.0;     // escape search radius, m
  double goal_dt = 1.0;  // lookahead used to place the local goal, s
  planner::SfcConfig sfc;
};

/// Cells around the start position written as Known Free before the first
/// scan. The sensor's vertical field of view never observes the cells right
/// above and below it.
struct BootstrapConfig {
  bool enabled = true;
  Vec3 half_extent{1.0, 1.0, 0.6};
};

struct Seeds {
  std::uint64_t world = 1;
  std::uint64_t lidar = 2;
  std::uint64_t odometry = 3;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 10.0;  // s
  Vec3 initial_position{0.0, 0.0, 1.0};
  double initial_yaw = 0.0;

  sim::WorldSpec world;
  sim::LidarConfig lidar;
  sim::PlantConfig plant;
  sim::WindConfig wind;
  sim::OdometryNoise odometry_noise;
  map::GridConfig grid;
  BootstrapConfig bootstrap;
  PlannerSettings planner;
  mpc::MpcConfig mpc;
  qp::QpSettings qp;
  JoystickConfig joystick;
  Rates rates;
  Seeds seeds;

  /// Safety threshold on the center-to-obstacle distance, m. Defaults to
  /// the vehicle half-size (planner.sfc.robot_radius) when negative.
  double safety_clearance = -1.0;
  bool stop_on_arrival = false;  // end the run when the last waypoint is reached

  double effective_safety_clearance() const {
    return safety_clearance >= 0.0 ? safety_clearance : planner.sfc.robot_radius;
  }

  /// Cross-module checks; throws ConfigError.
  void validate() const;
};

/// Schema violation; what() begins with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Missing keys keep their defaults; unknown keys, wrong types and invalid
/// values raise ConfigError. A top-level "d0" sets grid.r_occ.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
/// Every key with its effective value.
nlohmann::json config_to_json(const ScenarioConfig& cfg);

const char* to_string(JoystickKind k);

}  // namespace canopy::harness
