#pragma once

#include <memory>
#include <string>
#include <vector>

#include "canopy/harness/mailbox.hpp"
#include "canopy/harness/scenario_config.hpp"
#include "canopy/planner/joystick.hpp"

namespace canopy::harness {

/// Produces the pilot command at each joystick tick. Sources are polled on
/// the simulated clock only, so a scripted or recorded source is
/// deterministic.
class JoystickSource {
 public:
  virtual ~JoystickSource() = default;
  virtual planner::JoystickCommand poll(double t, const Odometry& odom) = 0;
  /// A scripted goal sequence has been completed.
  virtual bool finished() const { return false; }
};

class HoverSource : public JoystickSource {
 public:
  planner::JoystickCommand poll(double t, const Odometry& odom) override;
};

/// Flies toward each waypoint in turn at its speed; the command is expressed
/// in the yaw frame as a pilot would give it.
class WaypointSource : public JoystickSource {
 public:
  WaypointSource(std::vector<Waypoint> waypoints, double arrival_radius);
  planner::JoystickCommand poll(double t, const Odometry& odom) override;
  bool finished() const override { return next_ >= waypoints_.size(); }

 private:
  std::vector<Waypoint> waypoints_;
  double arrival_radius_;
  std::size_t next_ = 0;
};

class SegmentSource : public JoystickSource {
 public:
  explicit SegmentSource(std::vector<Segment> segments) : segments_(std::move(segments)) {}
  planner::JoystickCommand poll(double t, const Odometry& odom) override;

 private:
  std::vector<Segment> segments_;
};

/// Replays commands by stamp: the latest command with stamp <= t, zero
/// before the first. `finished` optionally carries the recorded source's
/// finished() flag per command.
class RecordedSource : public JoystickSource {
 public:
  explicit RecordedSource(std::vector<planner::JoystickCommand> commands,
                          std::vector<bool> finished = {});
  planner::JoystickCommand poll(double t, const Odometry& odom) override;
  bool finished() const override { return finished_now_; }

 private:
  std::vector<planner::JoystickCommand> commands_;
  std::vector<bool> finished_;
  std::size_t next_ = 0;
  planner::JoystickCommand current_;
  bool finished_now_ = false;
};

/// Reads {"t": s, "v": [x, y, z], "w_yaw": rad/s} lines; throws
/// std::runtime_error with the line number on malformed input.
std::vector<planner::JoystickCommand> read_joystick_recording(const std::string& path);

/// Latest command from the UI mailbox; zero velocity once no new message has
/// arrived for `silence_timeout` seconds of simulated time.
class LiveSource : public JoystickSource {
 public:
  LiveSource(const Mailbox<planner::JoystickCommand>& inbox, double silence_timeout)
      : inbox_(inbox), timeout_(silence_timeout) {}
  planner::JoystickCommand poll(double t, const Odometry& odom) override;
  bool silent() const { return silent_; }

 private:
  const Mailbox<planner::JoystickCommand>& inbox_;
  double timeout_;
  std::uint64_t last_seq_ = 0;
  double last_arrival_ = 0.0;
  bool have_message_ = false;
  bool silent_ = true;
  planner::JoystickCommand last_;
};

/// Builds the configured scripted/recorded source. Live sources need a
/// mailbox and are constructed by the caller.
std::unique_ptr<JoystickSource> make_joystick_source(const JoystickConfig& cfg);

}  // namespace canopy::harness
