#include "canopy/harness/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "canopy/mpc/reference_sampler.hpp"
#include "canopy/planner/sfc.hpp"

namespace canopy::harness {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 to_vec(const json& j) { return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()); }

double wall_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Ok: return "ok";
    case PlanStatus::Unreachable: return "unreachable";
    case PlanStatus::NoCorridor: return "no_corridor";
  }
  return "ok";
}

Simulation::Simulation(const ScenarioConfig& cfg, std::unique_ptr<JoystickSource> joystick)
    : cfg_(cfg),
      joystick_(std::move(joystick)),
      world_(sim::generate_world(cfg.world, cfg.seeds.world)),
      map_(cfg.grid, cfg.initial_position),
      goals_(cfg.joystick.max_speed),
      controller_(cfg.mpc, cfg.qp),
      lidar_rng_(cfg.seeds.lidar),
      odom_rng_(cfg.seeds.odometry) {
  plant_ = sim::make_plant_state(cfg.initial_position, cfg.initial_yaw);
  yaw_ref_ = wrap_angle(cfg.initial_yaw);
  hold_point_ = cfg.initial_position;
  cmd_.throttle = cfg.plant.throttle_coeff * cfg.plant.gravity;
  metrics_.min_clearance = std::numeric_limits<double>::infinity();
}

void Simulation::set_log(std::ostream* os) {
  log_os_ = os;
  log_ = os ? std::make_unique<RunLogWriter>(*os) : nullptr;
}

void Simulation::set_frame_callback(std::function<void(const Frame&)> cb, int scan_decimation) {
  frame_cb_ = std::move(cb);
  scan_decimation_ = std::max(1, scan_decimation);
}

void Simulation::event(std::string text) {
  if (frame_cb_) frame_events_.push_back(text);
  pending_events_.push_back(std::move(text));
}

void Simulation::timed(const char* module, double seconds) { timing_[module].push_back(seconds); }

void Simulation::initialize() {
  initialized_ = true;
  if (log_) log_->header(config_to_json(cfg_));

  if (cfg_.bootstrap.enabled) {
    // Only cells whose whole extent is clear of the world are declared free.
    const double half_diag = 0.5 * std::sqrt(3.0) * cfg_.grid.resolution;
    const Index3 lo = map_.cell_of(cfg_.initial_position - cfg_.bootstrap.half_extent);
    const Index3 hi = map_.cell_of(cfg_.initial_position + cfg_.bootstrap.half_extent);
    for (int x = lo.x(); x <= hi.x(); ++x) {
      for (int y = lo.y(); y <= hi.y(); ++y) {
        for (int z = lo.z(); z <= hi.z(); ++z) {
          const Index3 g(x, y, z);
          if (world_.distance(map_.center_of(g), 0.0) > half_diag) {
            map_.set_log_odds(g, cfg_.grid.l_min);
          }
        }
      }
    }
  }
  do_odometry();
  do_scan();
  do_joystick();
  do_mpc();
  write_record();
}

bool Simulation::step() {
  if (!initialized_) initialize();
  if (ended_) return false;

  const double dt = 1.0 / cfg_.rates.plant;
  const double t_prev = time();
  plant_ = sim::step_plant(plant_, cmd_, cfg_.wind.at(t_prev), dt, cfg_.plant);
  ++tick_;
  plant_.t_sim = time();
  if (plant_.fault) {
    metrics_.fault = true;
    event("plant: fault on non-finite or negative command");
    ended_ = true;
    if (log_) write_record();
    return false;
  }

  const int plant_rate = cfg_.rates.plant;
  if (fires_at(tick_, cfg_.rates.odometry, plant_rate)) do_odometry();
  if (fires_at(tick_, cfg_.rates.scan, plant_rate)) do_scan();
  if (fires_at(tick_, cfg_.rates.joystick, plant_rate)) do_joystick();
  if (fires_at(tick_, cfg_.rates.mpc, plant_rate)) {
    do_mpc();
    write_record();
  }

  const auto total_ticks = static_cast<std::int64_t>(std::llround(cfg_.duration * plant_rate));
  if (tick_ >= total_ticks) ended_ = true;
  if (cfg_.stop_on_arrival && joystick_->finished()) ended_ = true;
  return !ended_;
}

void Simulation::do_odometry() {
  odom_ = sim::read_odometry(plant_, cfg_.odometry_noise, odom_rng_);
  odom_.stamp = time();
}

void Simulation::do_scan() {
  const double w0 = wall_seconds();
  last_scan_ = sim::sample_scan(world_, plant_, time(), lidar_rng_, cfg_.lidar);
  const double w1 = wall_seconds();
  if (map_.recenter(odom_.p)) timed("map_slide", wall_seconds() - w1);
  const double w2 = wall_seconds();
  const auto transitions = map_.integrate_scan(last_scan_);
  const double w3 = wall_seconds();
  timed("lidar", w1 - w0);
  timed("map", w3 - w2);
  if (frame_cb_) {
    for (const auto& tr : transitions) map_delta_.emplace_back(tr.cell, tr.to);
  }
}

void Simulation::do_joystick() {
  const double w0 = wall_seconds();
  const double t = time();
  last_joy_ = joystick_->poll(t, odom_);
  last_joy_.stamp = t;
  joy_history_.push_back(last_joy_);
  const planner::LocalGoal goal = goals_.update(last_joy_, odom_, cfg_.planner.goal_dt);
  yaw_ref_ = goal.yaw_ref;

  PlanStatus status = PlanStatus::Ok;
  auto path = planner::search_reference_path(map_.inflated(), odom_.p, goal.position,
                                             cfg_.planner.beta);
  std::optional<planner::Corridor> corridor;
  if (!path) {
    status = PlanStatus::Unreachable;
  } else {
    const Vec3 seed = planner::closest_point_on_polyline({path->start, path->goal}, odom_.p);
    corridor = planner::generate_sfc(map_.probability(), seed, cfg_.planner.sfc);
    if (!corridor) status = PlanStatus::NoCorridor;
  }

  if (status != plan_status_) {
    event(std::string("planner: ") + to_string(status));
  }
  if (status == PlanStatus::Ok) {
    if (!path->p_inf.empty()) ++metrics_.escape_ticks;
    path_ = std::move(path);
    corridor_ = std::move(corridor);
  } else {
    if (plan_status_ == PlanStatus::Ok) hold_point_ = odom_.p;
    path_.reset();
    corridor_.reset();
    ++metrics_.hold_ticks;
  }
  plan_status_ = status;
  planned_since_record_ = true;
  timed("planner", wall_seconds() - w0);

  if (frame_cb_) {
    Frame f;
    f.t = t;
    f.plant = plant_;
    f.odom = odom_;
    f.command = cmd_;
    f.clearance = world_.distance(plant_.p, t);
    f.plan_status = plan_status_;
    f.path = path_;
    if (corridor_) f.sfc = corridor_->polytope;
    for (std::size_t i = 0; i < last_scan_.points.size(); i += static_cast<std::size_t>(scan_decimation_)) {
      const auto& pt = last_scan_.points[i];
      if (pt.valid()) f.scan_points.push_back(pt.endpoint(last_scan_.origin));
    }
    f.map_delta = std::move(map_delta_);
    map_delta_.clear();
    f.events = std::move(frame_events_);
    frame_events_.clear();
    frame_cb_(f);
  }
}

void Simulation::do_mpc() {
  const double w0 = wall_seconds();
  const mpc::MpcConfig& mc = cfg_.mpc;
  const mpc::MpcState x0{odom_.p, odom_.v, odom_.a};
  std::vector<Vec3> refs;
  const planner::Polytope* sfc = nullptr;
  if (path_) {
    sfc = corridor_ ? &corridor_->polytope : nullptr;
    refs = mpc::sample_references(*path_, odom_.p, mc.v_ref, mc.dt, mc.horizon, sfc);
  } else {
    refs.assign(static_cast<std::size_t>(mc.horizon), hold_point_);
  }
  const auto prev_status = last_solution_.status;
  last_solution_ = controller_.solve(refs, x0, sfc);
  cmd_ = controller_.command(last_solution_, x0, odom_.yaw, yaw_ref_);
  switch (last_solution_.status) {
    case mpc::MpcStatus::Solved: ++metrics_.mpc_solved; break;
    case mpc::MpcStatus::Degraded: ++metrics_.mpc_degraded; break;
    case mpc::MpcStatus::Infeasible: ++metrics_.mpc_infeasible; break;
  }
  if (last_solution_.status != prev_status && tick_ > 0) {
    event(std::string("mpc: ") + mpc::to_string(last_solution_.status));
  }
  timed("mpc", wall_seconds() - w0);
}

void Simulation::write_record() {
  const double t = time();
  const double clearance = world_.distance(plant_.p, t);
  metrics_.min_clearance = std::min(metrics_.min_clearance, clearance);
  trajectory_.push_back({t, plant_.p, plant_.v});
  if (!log_) {
    planned_since_record_ = false;
    pending_events_.clear();
    return;
  }
  json rec = {
      {"type", "tick"},
      {"t", t},
      {"p", vec(plant_.p)},
      {"v", vec(plant_.v)},
      {"yaw", plant_.yaw()},
      {"odom", {{"p", vec(odom_.p)}, {"v", vec(odom_.v)}, {"a", vec(odom_.a)}}},
      {"cmd", {{"p_r", cmd_.p_r}, {"q_r", cmd_.q_r}, {"r_r", cmd_.r_r}, {"throttle", cmd_.throttle}}},
      {"mpc", {{"status", mpc::to_string(last_solution_.status)},
               {"iterations", last_solution_.iterations},
               {"slack", last_solution_.slack}}},
      {"clearance", number_or_inf(clearance)},
  };
  if (planned_since_record_) {
    json plan = {
        {"joy", {{"t", last_joy_.stamp}, {"v", vec(last_joy_.v_joy)}, {"w_yaw", last_joy_.w_yaw},
                 {"done", joystick_->finished()}}},
        {"yaw_ref", yaw_ref_},
        {"status", to_string(plan_status_)},
    };
    if (path_) {
      json p_inf = json::array();
      for (const Vec3& c : path_->p_inf) p_inf.push_back(vec(c));
      plan["p_inf"] = std::move(p_inf);
      plan["start"] = vec(path_->start);
      plan["goal"] = vec(path_->goal);
    } else {
      plan["hold"] = vec(hold_point_);
    }
    if (corridor_) {
      json C = json::array();
      const auto& poly = corridor_->polytope;
      for (int i = 0; i < poly.size(); ++i) C.push_back(vec(poly.C.row(i).transpose()));
      plan["sfc"] = {{"C", std::move(C)}, {"d", std::vector<double>(poly.d.data(), poly.d.data() + poly.d.size())}};
    }
    rec["plan"] = std::move(plan);
    planned_since_record_ = false;
  }
  if (!pending_events_.empty()) {
    rec["events"] = pending_events_;
    pending_events_.clear();
  }
  log_->record(rec);
}

RunResult Simulation::finish() {
  if (!initialized_) initialize();
  fill_motion_metrics(metrics_, trajectory_);
  if (cfg_.joystick.kind == JoystickKind::Waypoints) {
    metrics_.completed = joystick_->finished() && !metrics_.fault;
  } else {
    metrics_.completed = !metrics_.fault;
  }
  metrics_.safety_violation =
      metrics_.fault || metrics_.min_clearance <= cfg_.effective_safety_clearance();
  for (const auto& [name, samples] : timing_) metrics_.timing[name] = percentiles(samples);
  if (log_) log_->summary(metrics_to_json(metrics_));

  RunResult r;
  r.metrics = metrics_;
  r.trajectory = trajectory_;
  r.joystick = joy_history_;
  return r;
}

RunResult Simulation::run() {
  while (step()) {
  }
  return finish();
}

RunResult run_scenario(const ScenarioConfig& cfg, std::ostream* log) {
  Simulation sim(cfg, make_joystick_source(cfg.joystick));
  sim.set_log(log);
  return sim.run();
}

ReplayReport replay_log(const RunLogContents& log) {
  const ScenarioConfig cfg = config_from_json(log.header.at("config"));
  std::vector<planner::JoystickCommand> commands;
  std::vector<bool> done;
  for (const auto& rec : log.records) {
    const auto it = rec.find("plan");
    if (it == rec.end()) continue;
    const auto& joy = it->at("joy");
    planner::JoystickCommand c;
    c.stamp = joy.at("t").get<double>();
    c.v_joy = to_vec(joy.at("v"));
    c.w_yaw = joy.at("w_yaw").get<double>();
    commands.push_back(c);
    done.push_back(joy.value("done", false));
  }

  std::ostringstream out;
  Simulation sim(cfg, std::make_unique<RecordedSource>(std::move(commands), std::move(done)));
  sim.set_log(&out);
  ReplayReport report;
  report.result = sim.run();

  std::istringstream in(out.str());
  const RunLogContents replayed = read_run_log(in);
  report.records = log.record_lines.size();
  report.identical = replayed.record_lines.size() == log.record_lines.size();
  const std::size_t n = std::min(replayed.record_lines.size(), log.record_lines.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (replayed.record_lines[i] != log.record_lines[i]) {
      report.identical = false;
      report.first_mismatch = i;
      report.expected_line = log.record_lines[i];
      report.actual_line = replayed.record_lines[i];
      return report;
    }
  }
  if (!report.identical) {
    report.first_mismatch = n;
  } else if (log.summary && replayed.summary && log.summary->dump() != replayed.summary->dump()) {
    report.identical = false;
    report.first_mismatch = n;
    report.expected_line = log.summary->dump();
    report.actual_line = replayed.summary->dump();
  }
  return report;
}

}  // namespace canopy::harness
