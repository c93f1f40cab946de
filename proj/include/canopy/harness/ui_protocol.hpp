#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "canopy/harness/simulation.hpp"

namespace canopy::harness::ui {

/// Every message is a JSON object with "type" and "version".
inline constexpr int kProtocolVersion = 1;

struct JoyMessage {
  Vec3 v = Vec3::Zero();  // yaw frame, m/s
  double w_yaw = 0.0;     // rad/s
};

struct TelemetryMessage {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double yaw = 0.0;
  double clearance = 0.0;  // +inf allowed ("inf" on the wire)
  double throttle = 0.0;
  std::string plan_status = "ok";
};

struct ScanMessage {
  double t = 0.0;
  Vec3 origin = Vec3::Zero();
  std::vector<Vec3> points;
};

struct MapCell {
  Index3 index = Index3::Zero();
  int state = 0;  // 0 Unknown, 1 Occupied, 2 Known Free
  bool operator==(const MapCell& o) const { return index == o.index && state == o.state; }
};

/// Cells whose state changed since the previous patch.
struct MapPatchMessage {
  double t = 0.0;
  double resolution = 0.1;
  std::vector<MapCell> cells;
};

struct PathMessage {
  double t = 0.0;
  std::vector<Vec3> p_inf;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  std::string status = "ok";
};

struct SfcMessage {
  double t = 0.0;
  std::vector<Vec3> normals;  // rows of C
  std::vector<double> offsets;  // d
};

struct EventMessage {
  double t = 0.0;
  std::string text;
};

using Message = std::variant<JoyMessage, TelemetryMessage, ScanMessage, MapPatchMessage,
                             PathMessage, SfcMessage, EventMessage>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* type_name(const Message& m);

nlohmann::json to_json(const Message& m);
/// Throws ProtocolError on unknown types, wrong versions, missing fields or
/// non-finite numbers (clearance may be "inf").
Message from_json(const nlohmann::json& j);

std::string encode(const Message& m);
Message decode(std::string_view text);

/// Joystick command from a client text frame; nullopt for anything that is
/// not a well-formed joy message.
std::optional<planner::JoystickCommand> parse_joy(std::string_view text);

/// Outbound bundle for one frame: telemetry, scan, map_patch, then path,
/// sfc and events when present.
std::vector<Message> frame_messages(const Frame& f, double resolution);

}  // namespace canopy::harness::ui
