#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "canopy/harness/joystick_source.hpp"
#include "canopy/harness/metrics.hpp"
#include "canopy/harness/run_log.hpp"
#include "canopy/harness/scenario_config.hpp"
#include "canopy/map/rog_map.hpp"
#include "canopy/mpc/mpc_controller.hpp"
#include "canopy/planner/reference_path.hpp"

namespace canopy::harness {

enum class PlanStatus { Ok, Unreachable, NoCorridor };

const char* to_string(PlanStatus s);

/// Snapshot handed to the UI publisher at the joystick rate.
struct Frame {
  double t = 0.0;
  sim::PlantState plant;
  Odometry odom;
  mpc::AttitudeCommand command;
  double clearance = 0.0;
  PlanStatus plan_status = PlanStatus::Ok;
  std::optional<planner::ReferencePath> path;
  std::optional<planner::Polytope> sfc;
  std::vector<Vec3> scan_points;                        // decimated valid endpoints
  std::vector<std::pair<Index3, map::CellState>> map_delta;  // changes since the last frame
  std::vector<std::string> events;
};

struct RunResult {
  Metrics metrics;
  std::vector<TrajectorySample> trajectory;  // one sample per logged tick
  std::vector<planner::JoystickCommand> joystick;
};

/// Multi-rate closed loop on a simulated 1/plant-rate clock. Within a tick
/// the order is plant, odometry, scan and map update, joystick and planner,
/// MPC. Nothing reads the wall clock except the timing statistics, which are
/// kept out of the log.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::unique_ptr<JoystickSource> joystick);

  void set_log(std::ostream* os);
  /// Called after every joystick tick. Collecting map deltas costs a little,
  /// so it is only done when a callback is set.
  void set_frame_callback(std::function<void(const Frame&)> cb, int scan_decimation = 20);

  /// Advances one plant tick. Returns false once the run has ended.
  bool step();
  /// Steps to the end, writes the summary and returns the metrics.
  RunResult run();
  RunResult finish();

  double time() const { return static_cast<double>(tick_) / cfg_.rates.plant; }
  std::int64_t tick() const { return tick_; }
  const ScenarioConfig& config() const { return cfg_; }
  const sim::WorldModel& world() const { return world_; }
  const sim::PlantState& plant() const { return plant_; }
  const Odometry& odometry() const { return odom_; }
  const map::RogMap& map() const { return map_; }
  const std::optional<planner::ReferencePath>& path() const { return path_; }
  const std::optional<planner::Corridor>& corridor() const { return corridor_; }
  const mpc::AttitudeCommand& command() const { return cmd_; }
  const std::vector<TrajectorySample>& trajectory() const { return trajectory_; }
  PlanStatus plan_status() const { return plan_status_; }

 private:
  void initialize();
  void do_odometry();
  void do_scan();
  void do_joystick();
  void do_mpc();
  void write_record();
  void event(std::string text);
  void timed(const char* module, double seconds);

  ScenarioConfig cfg_;
  std::unique_ptr<JoystickSource> joystick_;
  sim::WorldModel world_;
  map::RogMap map_;
  planner::GoalTracker goals_;
  mpc::MpcController controller_;
  std::mt19937_64 lidar_rng_;
  std::mt19937_64 odom_rng_;

  std::int64_t tick_ = 0;
  bool ended_ = false;
  bool initialized_ = false;

  sim::PlantState plant_;
  Odometry odom_;
  mpc::AttitudeCommand cmd_;
  std::optional<planner::ReferencePath> path_;
  std::optional<planner::Corridor> corridor_;
  PlanStatus plan_status_ = PlanStatus::Ok;
  Vec3 hold_point_ = Vec3::Zero();
  double yaw_ref_ = 0.0;
  planner::JoystickCommand last_joy_;
  mpc::MpcSolution last_solution_;
  LidarScan last_scan_;

  bool planned_since_record_ = false;
  std::vector<std::string> pending_events_;

  std::ostream* log_os_ = nullptr;
  std::unique_ptr<RunLogWriter> log_;
  std::function<void(const Frame&)> frame_cb_;
  int scan_decimation_ = 20;
  std::vector<std::pair<Index3, map::CellState>> map_delta_;
  std::vector<std::string> frame_events_;

  std::vector<TrajectorySample> trajectory_;
  std::vector<planner::JoystickCommand> joy_history_;
  Metrics metrics_;
  std::map<std::string, std::vector<double>> timing_;
};

/// Builds the configured joystick source and runs to completion.
RunResult run_scenario(const ScenarioConfig& cfg, std::ostream* log = nullptr);

struct ReplayReport {
  bool identical = false;
  std::size_t records = 0;
  std::size_t first_mismatch = 0;  // record index, valid when !identical
  std::string expected_line;
  std::string actual_line;
  RunResult result;
};

/// Re-runs a logged scenario with its recorded joystick stream and compares
/// every record byte for byte.
ReplayReport replay_log(const RunLogContents& log);

}  // namespace canopy::harness
