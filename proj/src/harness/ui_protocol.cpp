#include "canopy/harness/ui_protocol.hpp"

#include <cmath>

namespace canopy::harness::ui {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vec_list(const std::vector<Vec3>& vs) {
  json a = json::array();
  for (const Vec3& v : vs) a.push_back(vec(v));
  return a;
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ProtocolError(std::string(what) + ": expected number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ProtocolError(std::string(what) + ": not finite");
  return v;
}

double number_field(const json& j, const char* key) { return number(field(j, key), key); }

Vec3 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ProtocolError(std::string(what) + ": expected [x, y, z]");
  return Vec3(number(j[0], what), number(j[1], what), number(j[2], what));
}

std::vector<Vec3> vec_list_from(const json& j, const char* what) {
  if (!j.is_array()) throw ProtocolError(std::string(what) + ": expected array");
  std::vector<Vec3> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(vec_from(e, what));
  return out;
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw ProtocolError(std::string(key) + ": expected string");
  return v.get<std::string>();
}

json header(const char* type) { return {{"type", type}, {"version", kProtocolVersion}}; }

}  // namespace

const char* type_name(const Message& m) {
  return std::visit(Overloaded{
                        [](const JoyMessage&) { return "joy"; },
                        [](const TelemetryMessage&) { return "telemetry"; },
                        [](const ScanMessage&) { return "scan"; },
                        [](const MapPatchMessage&) { return "map_patch"; },
                        [](const PathMessage&) { return "path"; },
                        [](const SfcMessage&) { return "sfc"; },
                        [](const EventMessage&) { return "event"; },
                    },
                    m);
}

json to_json(const Message& m) {
  json j = header(type_name(m));
  std::visit(Overloaded{
                 [&](const JoyMessage& x) {
                   j["v"] = vec(x.v);
                   j["w_yaw"] = x.w_yaw;
                 },
                 [&](const TelemetryMessage& x) {
                   j["t"] = x.t;
                   j["p"] = vec(x.p);
                   j["vel"] = vec(x.v);
                   j["yaw"] = x.yaw;
                   j["clearance"] = number_or_inf(x.clearance);
                   j["throttle"] = x.throttle;
                   j["plan_status"] = x.plan_status;
                 },
                 [&](const ScanMessage& x) {
                   j["t"] = x.t;
                   j["origin"] = vec(x.origin);
                   j["points"] = vec_list(x.points);
                 },
                 [&](const MapPatchMessage& x) {
                   j["t"] = x.t;
                   j["resolution"] = x.resolution;
                   json cells = json::array();
                   for (const MapCell& c : x.cells) {
                     cells.push_back({c.index.x(), c.index.y(), c.index.z(), c.state});
                   }
                   j["cells"] = std::move(cells);
                 },
                 [&](const PathMessage& x) {
                   j["t"] = x.t;
                   j["p_inf"] = vec_list(x.p_inf);
                   j["start"] = vec(x.start);
                   j["goal"] = vec(x.goal);
                   j["status"] = x.status;
                 },
                 [&](const SfcMessage& x) {
                   j["t"] = x.t;
                   j["C"] = vec_list(x.normals);
                   j["d"] = x.offsets;
                 },
                 [&](const EventMessage& x) {
                   j["t"] = x.t;
                   j["text"] = x.text;
                 },
             },
             m);
  return j;
}

Message from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("message must be an object");
  const std::string type = string_field(j, "type");
  const json& ver = field(j, "version");
  if (!ver.is_number_integer() || ver.get<int>() != kProtocolVersion) {
    throw ProtocolError("unsupported version");
  }
  if (type == "joy") {
    JoyMessage m;
    m.v = vec_from(field(j, "v"), "v");
    m.w_yaw = number_field(j, "w_yaw");
    return m;
  }
  if (type == "telemetry") {
    TelemetryMessage m;
    m.t = number_field(j, "t");
    m.p = vec_from(field(j, "p"), "p");
    m.v = vec_from(field(j, "vel"), "vel");
    m.yaw = number_field(j, "yaw");
    const json& c = field(j, "clearance");
    m.clearance = c.is_string() ? parse_number_or_inf(c) : number(c, "clearance");
    m.throttle = number_field(j, "throttle");
    m.plan_status = string_field(j, "plan_status");
    return m;
  }
  if (type == "scan") {
    ScanMessage m;
    m.t = number_field(j, "t");
    m.origin = vec_from(field(j, "origin"), "origin");
    m.points = vec_list_from(field(j, "points"), "points");
    return m;
  }
  if (type == "map_patch") {
    MapPatchMessage m;
    m.t = number_field(j, "t");
    m.resolution = number_field(j, "resolution");
    const json& cells = field(j, "cells");
    if (!cells.is_array()) throw ProtocolError("cells: expected array");
    for (const auto& c : cells) {
      if (!c.is_array() || c.size() != 4) throw ProtocolError("cells: expected [i, j, k, state]");
      for (const auto& e : c) {
        if (!e.is_number_integer()) throw ProtocolError("cells: expected integers");
      }
      MapCell cell;
      cell.index = Index3(c[0].get<int>(), c[1].get<int>(), c[2].get<int>());
      cell.state = c[3].get<int>();
      if (cell.state < 0 || cell.state > 2) throw ProtocolError("cells: state out of range");
      m.cells.push_back(cell);
    }
    return m;
  }
  if (type == "path") {
    PathMessage m;
    m.t = number_field(j, "t");
    m.p_inf = vec_list_from(field(j, "p_inf"), "p_inf");
    m.start = vec_from(field(j, "start"), "start");
    m.goal = vec_from(field(j, "goal"), "goal");
    m.status = string_field(j, "status");
    return m;
  }
  if (type == "sfc") {
    SfcMessage m;
    m.t = number_field(j, "t");
    m.normals = vec_list_from(field(j, "C"), "C");
    const json& d = field(j, "d");
    if (!d.is_array() || d.size() != m.normals.size()) {
      throw ProtocolError("d: expected one offset per row of C");
    }
    for (const auto& e : d) m.offsets.push_back(number(e, "d"));
    return m;
  }
  if (type == "event") {
    EventMessage m;
    m.t = number_field(j, "t");
    m.text = string_field(j, "text");
    return m;
  }
  throw ProtocolError("unknown message type '" + type + "'");
}

std::string encode(const Message& m) { return to_json(m).dump(); }

Message decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    // Includes number overflow, which is not a parse_error.
    throw ProtocolError(std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

std::optional<planner::JoystickCommand> parse_joy(std::string_view text) {
  try {
    const Message m = decode(text);
    const auto* joy = std::get_if<JoyMessage>(&m);
    if (!joy) return std::nullopt;
    planner::JoystickCommand c;
    c.v_joy = joy->v;
    c.w_yaw = joy->w_yaw;
    return c;
  } catch (const ProtocolError&) {
    return std::nullopt;
  }
}

std::vector<Message> frame_messages(const Frame& f, double resolution) {
  std::vector<Message> out;
  TelemetryMessage tm;
  tm.t = f.t;
  tm.p = f.plant.p;
  tm.v = f.plant.v;
  tm.yaw = f.plant.yaw();
  tm.clearance = f.clearance;
  tm.throttle = f.command.throttle;
  tm.plan_status = to_string(f.plan_status);
  out.emplace_back(tm);

  ScanMessage sm;
  sm.t = f.t;
  sm.origin = f.plant.p;
  sm.points = f.scan_points;
  out.emplace_back(std::move(sm));

  MapPatchMessage mp;
  mp.t = f.t;
  mp.resolution = resolution;
  for (const auto& [cell, state] : f.map_delta) {
    mp.cells.push_back({cell, static_cast<int>(state)});
  }
  out.emplace_back(std::move(mp));

  if (f.path) {
    PathMessage pm;
    pm.t = f.t;
    pm.p_inf = f.path->p_inf;
    pm.start = f.path->start;
    pm.goal = f.path->goal;
    pm.status = to_string(f.plan_status);
    out.emplace_back(std::move(pm));
  }
  if (f.sfc) {
    SfcMessage sf;
    sf.t = f.t;
    for (int i = 0; i < f.sfc->size(); ++i) {
      sf.normals.push_back(f.sfc->C.row(i).transpose());
      sf.offsets.push_back(f.sfc->d(i));
    }
    out.emplace_back(std::move(sf));
  }
  for (const auto& e : f.events) out.emplace_back(EventMessage{f.t, e});
  return out;
}

}  // namespace canopy::harness::ui
