#include "canopy/harness/joystick_source.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace canopy::harness {

planner::JoystickCommand HoverSource::poll(double t, const Odometry&) {
  planner::JoystickCommand c;
  c.stamp = t;
  return c;
}

WaypointSource::WaypointSource(std::vector<Waypoint> waypoints, double arrival_radius)
    : waypoints_(std::move(waypoints)), arrival_radius_(arrival_radius) {}

planner::JoystickCommand WaypointSource::poll(double t, const Odometry& odom) {
  planner::JoystickCommand c;
  c.stamp = t;
  while (next_ < waypoints_.size() &&
         (waypoints_[next_].position - odom.p).norm() <= arrival_radius_) {
    ++next_;
  }
  if (next_ >= waypoints_.size()) return c;
  const Waypoint& wp = waypoints_[next_];
  const Vec3 world = (wp.position - odom.p).normalized() * wp.speed;
  // World to yaw frame.
  const double cy = std::cos(odom.yaw), sy = std::sin(odom.yaw);
  c.v_joy = Vec3(cy * world.x() + sy * world.y(), -sy * world.x() + cy * world.y(), world.z());
  return c;
}

planner::JoystickCommand SegmentSource::poll(double t, const Odometry&) {
  planner::JoystickCommand c;
  c.stamp = t;
  for (const Segment& s : segments_) {
    if (t >= s.t_begin && t < s.t_end) {
      c.v_joy = s.v_joy;
      c.w_yaw = s.w_yaw;
      break;
    }
  }
  return c;
}

RecordedSource::RecordedSource(std::vector<planner::JoystickCommand> commands,
                               std::vector<bool> finished)
    : commands_(std::move(commands)), finished_(std::move(finished)) {}

planner::JoystickCommand RecordedSource::poll(double t, const Odometry&) {
  while (next_ < commands_.size() && commands_[next_].stamp <= t) {
    current_ = commands_[next_];
    finished_now_ = next_ < finished_.size() && finished_[next_];
    ++next_;
  }
  planner::JoystickCommand c = current_;
  c.stamp = t;
  return c;
}

std::vector<planner::JoystickCommand> read_joystick_recording(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open joystick recording " + path);
  std::vector<planner::JoystickCommand> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      planner::JoystickCommand c;
      c.stamp = j.at("t").get<double>();
      const auto& v = j.at("v");
      c.v_joy = Vec3(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
      c.w_yaw = j.value("w_yaw", 0.0);
      if (!out.empty() && c.stamp < out.back().stamp) throw std::runtime_error("stamps decrease");
      out.push_back(c);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

planner::JoystickCommand LiveSource::poll(double t, const Odometry&) {
  if (const auto entry = inbox_.latest(); entry && entry->seq != last_seq_) {
    last_seq_ = entry->seq;
    last_arrival_ = t;
    have_message_ = true;
    last_ = entry->value;
  }
  silent_ = !have_message_ || t - last_arrival_ > timeout_;
  planner::JoystickCommand c = silent_ ? planner::JoystickCommand{} : last_;
  c.stamp = t;
  return c;
}

std::unique_ptr<JoystickSource> make_joystick_source(const JoystickConfig& cfg) {
  switch (cfg.kind) {
    case JoystickKind::Hover: return std::make_unique<HoverSource>();
    case JoystickKind::Waypoints:
      return std::make_unique<WaypointSource>(cfg.waypoints, cfg.arrival_radius);
    case JoystickKind::Segments: return std::make_unique<SegmentSource>(cfg.segments);
    case JoystickKind::Recorded:
      return std::make_unique<RecordedSource>(read_joystick_recording(cfg.recorded_path));
    case JoystickKind::Live:
      throw std::invalid_argument("live joystick source needs a UI mailbox");
  }
  return std::make_unique<HoverSource>();
}

}  // namespace canopy::harness
