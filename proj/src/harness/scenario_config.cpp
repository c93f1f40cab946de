#include "canopy/harness/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace canopy::harness {

using nlohmann::json;

namespace {

// Every config struct is described once by a field list; the same list
// drives parsing and serialization.
template <class V> void describe(V& v, Aabb& b);
template <class V> void describe(V& v, sim::Box& b);
template <class V> void describe(V& v, sim::Capsule& c);
template <class V> void describe(V& v, sim::Net& n);
template <class V> void describe(V& v, sim::Sphere& s);
template <class V> void describe(V& v, sim::WorldSpec& w);
template <class V> void describe(V& v, sim::LidarConfig& c);
template <class V> void describe(V& v, sim::PlantConfig& c);
template <class V> void describe(V& v, sim::WindConfig& c);
template <class V> void describe(V& v, sim::OdometryNoise& c);
template <class V> void describe(V& v, map::GridConfig& c);
template <class V> void describe(V& v, BootstrapConfig& c);
template <class V> void describe(V& v, planner::SfcConfig& c);
template <class V> void describe(V& v, PlannerSettings& c);
template <class V> void describe(V& v, mpc::MpcConfig& c);
template <class V> void describe(V& v, qp::QpSettings& c);
template <class V> void describe(V& v, Waypoint& w);
template <class V> void describe(V& v, Segment& s);
template <class V> void describe(V& v, JoystickConfig& c);
template <class V> void describe(V& v, Rates& r);
template <class V> void describe(V& v, Seeds& s);
template <class V> void describe(V& v, ScenarioConfig& c);

std::string type_name(const json& j) { return j.type_name(); }

[[noreturn]] void type_error(const std::string& path, const char* expected, const json& j) {
  throw ConfigError(path, std::string("expected ") + expected + ", got " + type_name(j));
}

void read(const json& j, const std::string& path, double& out) {
  if (!j.is_number()) type_error(path, "number", j);
  out = j.get<double>();
  if (!std::isfinite(out)) throw ConfigError(path, "must be finite");
}
void read(const json& j, const std::string& path, int& out) {
  if (!j.is_number_integer()) type_error(path, "integer", j);
  out = j.get<int>();
}
void read(const json& j, const std::string& path, std::uint64_t& out) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    type_error(path, "non-negative integer", j);
  }
  out = j.get<std::uint64_t>();
}
void read(const json& j, const std::string& path, bool& out) {
  if (!j.is_boolean()) type_error(path, "boolean", j);
  out = j.get<bool>();
}
void read(const json& j, const std::string& path, std::string& out) {
  if (!j.is_string()) type_error(path, "string", j);
  out = j.get<std::string>();
}
void read(const json& j, const std::string& path, Vec3& out) {
  if (!j.is_array() || j.size() != 3) type_error(path, "array of 3 numbers", j);
  for (int i = 0; i < 3; ++i) read(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]", out(i));
}
void read(const json& j, const std::string& path, Index3& out) {
  if (!j.is_array() || j.size() != 3) type_error(path, "array of 3 integers", j);
  for (int i = 0; i < 3; ++i) read(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]", out(i));
}
// A 3-vector is read as a diagonal matrix.
void read(const json& j, const std::string& path, Eigen::Matrix3d& out) {
  if (!j.is_array() || j.size() != 3) type_error(path, "3-vector diagonal or 3x3 array", j);
  if (j[0].is_array()) {
    for (int r = 0; r < 3; ++r) {
      Vec3 row;
      read(j[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]", row);
      out.row(r) = row.transpose();
    }
  } else {
    Vec3 diag;
    read(j, path, diag);
    out = diag.asDiagonal();
  }
}
void read(const json& j, const std::string& path, JoystickKind& out) {
  if (!j.is_string()) type_error(path, "string", j);
  const auto s = j.get<std::string>();
  for (JoystickKind k : {JoystickKind::Hover, JoystickKind::Waypoints, JoystickKind::Segments,
                         JoystickKind::Recorded, JoystickKind::Live}) {
    if (s == to_string(k)) {
      out = k;
      return;
    }
  }
  throw ConfigError(path, "unknown joystick kind '" + s +
                              "' (hover, waypoints, segments, recorded, live)");
}

class Reader;
template <class T>
void read(const json& j, const std::string& path, std::vector<T>& out);
template <class T>
auto read(const json& j, const std::string& path, T& out)
    -> decltype(describe(std::declval<Reader&>(), out), void());

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) type_error(path_.empty() ? "<root>" : path_, "object", j_);
  }

  template <class T>
  void field(const char* key, T& value) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, child(key), value);
  }

  // Keys consumed outside describe().
  void accept(const char* key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(child(key.c_str()), "unknown key");
    }
  }

 private:
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
void read(const json& j, const std::string& path, std::vector<T>& out) {
  if (!j.is_array()) type_error(path, "array", j);
  out.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    T item{};
    read(j[i], path + "[" + std::to_string(i) + "]", item);
    out.push_back(std::move(item));
  }
}

template <class T>
auto read(const json& j, const std::string& path, T& out)
    -> decltype(describe(std::declval<Reader&>(), out), void()) {
  Reader r(j, path);
  describe(r, out);
  r.finish();
}

json write(double v) { return v; }
json write(int v) { return v; }
json write(std::uint64_t v) { return v; }
json write(bool v) { return v; }
json write(const std::string& v) { return v; }
json write(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json write(const Index3& v) { return json::array({v.x(), v.y(), v.z()}); }
json write(const Eigen::Matrix3d& m) {
  if (m.isDiagonal(0.0)) return write(Vec3(m.diagonal()));
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(write(Vec3(m.row(r).transpose())));
  return rows;
}
json write(JoystickKind k) { return to_string(k); }

class Writer;
template <class T>
auto write(T& v) -> decltype(describe(std::declval<Writer&>(), v), json());
template <class T>
json write(std::vector<T>& v);

class Writer {
 public:
  template <class T>
  void field(const char* key, T& value) {
    out[key] = write(value);
  }
  void accept(const char*) {}
  json out = json::object();
};

template <class T>
auto write(T& v) -> decltype(describe(std::declval<Writer&>(), v), json()) {
  Writer w;
  describe(w, v);
  return w.out;
}
template <class T>
json write(std::vector<T>& v) {
  json a = json::array();
  for (auto& item : v) a.push_back(write(item));
  return a;
}

template <class V> void describe(V& v, Aabb& b) {
  v.field("min", b.min);
  v.field("max", b.max);
}
template <class V> void describe(V& v, sim::Box& b) {
  v.field("min", b.box.min);
  v.field("max", b.box.max);
}
template <class V> void describe(V& v, sim::Capsule& c) {
  v.field("a", c.a);
  v.field("b", c.b);
  v.field("radius", c.radius);
}
template <class V> void describe(V& v, sim::Net& n) {
  v.field("corner", n.corner);
  v.field("u", n.u);
  v.field("v", n.v);
  v.field("wire_radius", n.wire_radius);
  v.field("spacing", n.spacing);
}
template <class V> void describe(V& v, sim::Sphere& s) {
  v.field("center", s.center);
  v.field("velocity", s.velocity);
  v.field("radius", s.radius);
}
template <class V> void describe(V& v, sim::WorldSpec& w) {
  v.field("bounds", w.bounds);
  v.field("ground", w.ground);
  v.field("ground_base", w.ground_base);
  v.field("terrain_amplitude", w.terrain_amplitude);
  v.field("terrain_wavelength", w.terrain_wavelength);
  v.field("branch_density", w.branch_density);
  v.field("branch_radius_min", w.branch_radius_min);
  v.field("branch_radius_max", w.branch_radius_max);
  v.field("branch_length_min", w.branch_length_min);
  v.field("branch_length_max", w.branch_length_max);
  v.field("boxes", w.boxes);
  v.field("capsules", w.capsules);
  v.field("nets", w.nets);
  v.field("spheres", w.spheres);
}
template <class V> void describe(V& v, sim::LidarConfig& c) {
  v.field("points_per_scan", c.points_per_scan);
  v.field("max_range", c.max_range);
  v.field("range_sigma", c.range_sigma);
  v.field("elevation_half_fov", c.elevation_half_fov);
  v.field("near_blind", c.near_blind);
  v.field("mount_offset", c.mount_offset);
}
template <class V> void describe(V& v, sim::PlantConfig& c) {
  v.field("throttle_coeff", c.throttle_coeff);
  v.field("tau_omega", c.tau_omega);
  v.field("gravity", c.gravity);
}
template <class V> void describe(V& v, sim::WindConfig& c) {
  v.field("bias", c.bias);
  v.field("gust_amplitude", c.gust_amplitude);
  v.field("gust_frequency", c.gust_frequency);
}
template <class V> void describe(V& v, sim::OdometryNoise& c) {
  v.field("sigma_p", c.sigma_p);
  v.field("sigma_v", c.sigma_v);
}
template <class V> void describe(V& v, map::GridConfig& c) {
  v.field("resolution", c.resolution);
  v.field("dims", c.dims);
  v.field("p_hit", c.p_hit);
  v.field("p_miss", c.p_miss);
  v.field("l_occ", c.l_occ);
  v.field("l_free", c.l_free);
  v.field("l_min", c.l_min);
  v.field("l_max", c.l_max);
  v.field("r_occ", c.r_occ);
  v.field("r_unk", c.r_unk);
  v.field("raycast_range", c.raycast_range);
  v.field("infinite_check_range", c.infinite_check_range);
  v.field("slide_threshold", c.slide_threshold);
}
template <class V> void describe(V& v, BootstrapConfig& c) {
  v.field("enabled", c.enabled);
  v.field("half_extent", c.half_extent);
}
template <class V> void describe(V& v, planner::SfcConfig& c) {
  v.field("robot_radius", c.robot_radius);
  v.field("max_planes", c.max_planes);
  v.field("exclusion_eps", c.exclusion_eps);
}
template <class V> void describe(V& v, PlannerSettings& c) {
  v.field("beta", c.beta);
  v.field("goal_dt", c.goal_dt);
  v.field("sfc", c.sfc);
}
template <class V> void describe(V& v, mpc::MpcConfig& c) {
  v.field("horizon", c.horizon);
  v.field("dt", c.dt);
  v.field("R_p", c.R_p);
  v.field("R_u", c.R_u);
  v.field("R_c", c.R_c);
  v.field("R_v_terminal", c.R_v_terminal);
  v.field("R_a_terminal", c.R_a_terminal);
  v.field("v_max", c.v_max);
  v.field("a_max_xy", c.a_max_xy);
  v.field("a_z_min", c.a_z_min);
  v.field("a_z_max", c.a_z_max);
  v.field("j_max", c.j_max);
  v.field("v_ref", c.v_ref);
  v.field("throttle_coeff", c.throttle_coeff);
  v.field("gravity", c.gravity);
  v.field("brake_gain", c.brake_gain);
  v.field("slack_weight", c.slack_weight);
}
template <class V> void describe(V& v, qp::QpSettings& c) {
  v.field("eps_abs", c.eps_abs);
  v.field("eps_rel", c.eps_rel);
  v.field("eps_infeasible", c.eps_infeasible);
  v.field("max_iterations", c.max_iterations);
  v.field("rho", c.rho);
  v.field("sigma", c.sigma);
  v.field("alpha", c.alpha);
  v.field("adaptive_rho", c.adaptive_rho);
  v.field("adaptive_rho_interval", c.adaptive_rho_interval);
  v.field("check_interval", c.check_interval);
  v.field("scaling_iterations", c.scaling_iterations);
  v.field("regularization", c.regularization);
  v.field("polish", c.polish);
}
template <class V> void describe(V& v, Waypoint& w) {
  v.field("position", w.position);
  v.field("speed", w.speed);
}
template <class V> void describe(V& v, Segment& s) {
  v.field("t_begin", s.t_begin);
  v.field("t_end", s.t_end);
  v.field("v_joy", s.v_joy);
  v.field("w_yaw", s.w_yaw);
}
template <class V> void describe(V& v, JoystickConfig& c) {
  v.field("kind", c.kind);
  v.field("waypoints", c.waypoints);
  v.field("arrival_radius", c.arrival_radius);
  v.field("segments", c.segments);
  v.field("recorded_path", c.recorded_path);
  v.field("max_speed", c.max_speed);
  v.field("silence_timeout", c.silence_timeout);
}
template <class V> void describe(V& v, Rates& r) {
  v.field("plant", r.plant);
  v.field("odometry", r.odometry);
  v.field("scan", r.scan);
  v.field("joystick", r.joystick);
  v.field("mpc", r.mpc);
}
template <class V> void describe(V& v, Seeds& s) {
  v.field("world", s.world);
  v.field("lidar", s.lidar);
  v.field("odometry", s.odometry);
}
template <class V> void describe(V& v, ScenarioConfig& c) {
  v.field("name", c.name);
  v.field("duration", c.duration);
  v.field("initial_position", c.initial_position);
  v.field("initial_yaw", c.initial_yaw);
  v.field("world", c.world);
  v.field("lidar", c.lidar);
  v.field("plant", c.plant);
  v.field("wind", c.wind);
  v.field("odometry_noise", c.odometry_noise);
  v.field("grid", c.grid);
  v.field("bootstrap", c.bootstrap);
  v.field("planner", c.planner);
  v.field("mpc", c.mpc);
  v.field("qp", c.qp);
  v.field("joystick", c.joystick);
  v.field("rates", c.rates);
  v.field("seeds", c.seeds);
  v.field("safety_clearance", c.safety_clearance);
  v.field("stop_on_arrival", c.stop_on_arrival);
}

template <class F>
void translate(const char* path, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

const char* to_string(JoystickKind k) {
  switch (k) {
    case JoystickKind::Hover: return "hover";
    case JoystickKind::Waypoints: return "waypoints";
    case JoystickKind::Segments: return "segments";
    case JoystickKind::Recorded: return "recorded";
    case JoystickKind::Live: return "live";
  }
  return "hover";
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0)) throw ConfigError("duration", "must be positive");
  translate("world", [&] { world.validate(); });
  translate("grid", [&] { grid.validate(); });
  translate("mpc", [&] { mpc.validate(); });

  const auto positive_rate = [&](const char* path, int r) {
    if (r < 1 || r > rates.plant) {
      throw ConfigError(path, "must lie in [1, rates.plant]");
    }
  };
  if (rates.plant < 1) throw ConfigError("rates.plant", "must be positive");
  positive_rate("rates.odometry", rates.odometry);
  positive_rate("rates.scan", rates.scan);
  positive_rate("rates.joystick", rates.joystick);
  positive_rate("rates.mpc", rates.mpc);

  if (plant.throttle_coeff != mpc.throttle_coeff) {
    throw ConfigError("plant.throttle_coeff", "must equal mpc.throttle_coeff");
  }
  if (plant.gravity != mpc.gravity) throw ConfigError("plant.gravity", "must equal mpc.gravity");
  if (!(plant.tau_omega > 0.0)) throw ConfigError("plant.tau_omega", "must be positive");
  if (lidar.points_per_scan < 0) throw ConfigError("lidar.points_per_scan", "must be >= 0");
  if (!(lidar.max_range > 0.0)) throw ConfigError("lidar.max_range", "must be positive");
  if (lidar.range_sigma < 0.0) throw ConfigError("lidar.range_sigma", "must be >= 0");
  if (!(planner.beta > 0.0)) throw ConfigError("planner.beta", "must be positive");
  if (!(planner.goal_dt > 0.0)) throw ConfigError("planner.goal_dt", "must be positive");
  if (planner.sfc.robot_radius < 0.0) throw ConfigError("planner.sfc.robot_radius", "must be >= 0");
  if (planner.sfc.max_planes < 7) throw ConfigError("planner.sfc.max_planes", "must be >= 7");
  if (!(joystick.max_speed > 0.0)) throw ConfigError("joystick.max_speed", "must be positive");
  if (!(joystick.silence_timeout > 0.0)) {
    throw ConfigError("joystick.silence_timeout", "must be positive");
  }
  for (std::size_t i = 0; i < joystick.waypoints.size(); ++i) {
    if (!(joystick.waypoints[i].speed >= 0.0)) {
      throw ConfigError("joystick.waypoints[" + std::to_string(i) + "].speed", "must be >= 0");
    }
  }
  if (joystick.kind == JoystickKind::Recorded && joystick.recorded_path.empty()) {
    throw ConfigError("joystick.recorded_path", "required for kind 'recorded'");
  }
  if (!world.bounds.contains(initial_position)) {
    throw ConfigError("initial_position", "must lie inside world.bounds");
  }
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  Reader r(j, "");
  describe(r, cfg);
  r.accept("d0");
  r.accept("version");
  r.finish();
  if (const auto it = j.find("d0"); it != j.end()) read(*it, "d0", cfg.grid.r_occ);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ScenarioConfig& cfg) {
  ScenarioConfig copy = cfg;
  json j = write(copy);
  j["version"] = 1;
  return j;
}

}  // namespace canopy::harness
