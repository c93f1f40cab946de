// canopy: run, replay and benchmark the assisted-flight pipeline.
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 safety invariant
// violated (plant fault or clearance at or below the threshold), 3 replay
// diverged from the log.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "canopy/harness/simulation.hpp"
#include "canopy/harness/ui_bridge.hpp"
#include "canopy/harness/ui_protocol.hpp"
#include "canopy/map/rog_map.hpp"
#include "canopy/mpc/benchmark.hpp"
#include "canopy/mpc/mpc_controller.hpp"
#include "canopy/sim/lidar.hpp"

namespace {

using namespace canopy;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSafety = 2;
constexpr int kExitReplayMismatch = 3;
constexpr unsigned short kDefaultPort = 8765;

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

void print_summary(const harness::RunResult& r) {
  std::cout << harness::metrics_to_json(r.metrics, true).dump(2) << '\n';
}

int run_command(const std::string& config_path, std::optional<unsigned short> serve_port, bool serve,
                std::optional<std::uint64_t> seed, std::string log_path) {
  harness::ScenarioConfig cfg = harness::load_config(config_path);
  if (seed) {
    cfg.seeds.world = *seed;
    cfg.seeds.lidar = *seed + 1;
    cfg.seeds.odometry = *seed + 2;
  }
  if (log_path.empty()) log_path = env("CANOPY_LOG").value_or("");

  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) {
      std::cerr << "cannot open log " << log_path << '\n';
      return kExitError;
    }
  }
  std::ostream* log = log_path.empty() ? nullptr : &log_file;

  harness::RunResult result;
  if (!serve) {
    result = harness::run_scenario(cfg, log);
  } else {
    unsigned short port = kDefaultPort;
    if (serve_port) {
      port = *serve_port;
    } else if (const auto p = env("CANOPY_PORT")) {
      port = static_cast<unsigned short>(std::stoi(*p));
    }
    harness::ui::UiBridge bridge(port);
    bridge.start();
    std::cerr << "serving on ws://0.0.0.0:" << bridge.port() << '\n';
    cfg.joystick.kind = harness::JoystickKind::Live;
    harness::Simulation sim(cfg, std::make_unique<harness::LiveSource>(
                                     bridge.joystick_inbox(), cfg.joystick.silence_timeout));
    sim.set_log(log);
    const double resolution = cfg.grid.resolution;
    sim.set_frame_callback([&](const harness::Frame& f) {
      std::vector<std::string> bundle;
      for (const auto& m : harness::ui::frame_messages(f, resolution)) {
        bundle.push_back(harness::ui::encode(m));
      }
      bridge.publish(std::move(bundle));
    });
    // Simulated time runs at 1x wall time.
    const auto start = std::chrono::steady_clock::now();
    while (sim.step()) {
      std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                std::chrono::duration<double>(sim.time())));
    }
    result = sim.finish();
    std::cerr << "malformed client messages: " << bridge.malformed_count() << '\n';
    bridge.stop();
  }
  print_summary(result);
  if (result.metrics.safety_violation) {
    std::cerr << "safety violation: min clearance " << result.metrics.min_clearance
              << (result.metrics.fault ? " (plant fault)" : "") << '\n';
    return kExitSafety;
  }
  return kExitOk;
}

int replay_command(const std::string& path) {
  const auto contents = harness::read_run_log_file(path);
  const auto report = harness::replay_log(contents);
  print_summary(report.result);
  if (!report.identical) {
    std::cerr << "replay diverged at record " << report.first_mismatch << " of " << report.records
              << "\n  expected: " << report.expected_line << "\n  actual:   " << report.actual_line
              << '\n';
    return kExitReplayMismatch;
  }
  std::cerr << "replay identical over " << report.records << " records\n";
  return report.result.metrics.safety_violation ? kExitSafety : kExitOk;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

void bench_qp() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  qp::AdmmSolver solver;
  std::vector<double> times, iters;
  for (int k = 0; k < 200; ++k) {
    const int nv = 5 + k % 16;
    const int m = 2 * nv;
    qp::QpProblem p;
    Eigen::MatrixXd M(nv, nv);
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) M(i, j) = n(rng);
    p.H = M * M.transpose() + 1e-3 * Eigen::MatrixXd::Identity(nv, nv);
    p.g = Eigen::VectorXd::NullaryExpr(nv, [&] { return n(rng); });
    p.A = Eigen::MatrixXd::NullaryExpr(m, nv, [&] { return n(rng); });
    p.l = Eigen::VectorXd::Constant(m, -1.0);
    p.u = Eigen::VectorXd::Constant(m, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solver.solve(p);
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    iters.push_back(sol.iterations);
  }
  std::cout << "qp: 200 random instances, median " << median(times) * 1e3 << " ms, median "
            << median(iters) << " iterations\n";
}

void bench_mpc() {
  mpc::MpcConfig cfg;
  const auto seq = mpc::benchmark_sequence(300, cfg, 11);
  mpc::MpcController warm(cfg);
  std::vector<double> times, warm_iters, cold_iters;
  for (const auto& inst : seq) {
    const auto sol = warm.solve(inst.refs, inst.x0, &inst.sfc);
    times.push_back(sol.solve_time);
    warm_iters.push_back(sol.iterations);
    mpc::MpcController cold(cfg);
    cold_iters.push_back(cold.solve(inst.refs, inst.x0, &inst.sfc).iterations);
  }
  std::cout << "mpc: N=" << cfg.horizon << ", " << seq.size() << " solves, median "
            << median(times) * 1e3 << " ms, median iterations warm " << median(warm_iters)
            << " / cold " << median(cold_iters) << '\n';
}

void bench_map() {
  sim::WorldSpec spec;
  spec.bounds = Aabb{Vec3(-10, -10, -1), Vec3(10, 10, 6)};
  spec.branch_density = 0.5;
  const auto world = sim::generate_world(spec, 3);
  map::GridConfig gc;
  gc.dims = Index3(128, 128, 40);
  map::RogMap m(gc, Vec3(0, 0, 1.5));
  std::mt19937_64 rng(5);
  sim::LidarConfig lc;
  std::vector<double> times;
  for (int k = 0; k < 30; ++k) {
    const auto pose = sim::make_plant_state(Vec3(0.05 * k, 0.0, 1.5), 0.0);
    const auto scan = sim::sample_scan(world, pose, k / 30.0, rng, lc);
    const auto t0 = std::chrono::steady_clock::now();
    m.integrate_scan(scan);
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::cout << "map: " << lc.points_per_scan << " points/scan, median integrate "
            << median(times) * 1e3 << " ms\n";
}

int bench_command(const std::string& suite) {
  if (suite == "qp" || suite == "all") bench_qp();
  if (suite == "mpc" || suite == "all") bench_mpc();
  if (suite == "map" || suite == "all") bench_map();
  if (suite != "qp" && suite != "mpc" && suite != "map" && suite != "all") {
    std::cerr << "unknown suite '" << suite << "' (qp, mpc, map, all)\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canopy: assisted obstacle-avoidance flight simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario");
  std::string config_path, log_path;
  bool headless = false;
  std::optional<unsigned short> serve_port;
  std::optional<std::uint64_t> seed;
  run->add_option("config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  auto* headless_flag = run->add_flag("--headless", headless, "Run as fast as possible (default)");
  auto* serve_opt = run->add_option("--serve", serve_port,
                                    "Serve the pilot UI over WebSocket (port from CANOPY_PORT or 8765 if omitted)")
                        ->expected(0, 1);
  headless_flag->excludes(serve_opt);
  run->add_option("--seed", seed, "Base seed for world, lidar and odometry");
  run->add_option("--log", log_path, "JSONL run log (default: CANOPY_LOG)");

  auto* replay = app.add_subcommand("replay", "Re-run a log and verify it is reproduced exactly");
  std::string replay_path;
  replay->add_option("log", replay_path, "Run log")->required()->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Timing benchmarks");
  std::string suite;
  bench->add_option("suite", suite, "qp, mpc, map or all")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, serve_port, serve_opt->count() > 0, seed, log_path);
    if (*replay) return replay_command(replay_path);
    if (*bench) return bench_command(suite);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
