#include <atomic>
#include <chrono>
#include <functional>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "canopy/harness/simulation.hpp"
#include "canopy/harness/ui_bridge.hpp"
#include "canopy/harness/ui_protocol.hpp"

namespace {

using namespace canopy;
using namespace canopy::harness;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using namespace std::chrono_literals;

class Client {
 public:
  explicit Client(unsigned short port) : ws_(io_) {
    tcp::resolver resolver(io_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }
  ~Client() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }
  void send(const std::string& text) {
    ws_.text(true);
    ws_.write(asio::buffer(text));
  }
  std::string receive() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return beast::buffers_to_string(buf.data());
  }

 private:
  asio::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

bool wait_for(const std::function<bool()>& pred, std::chrono::milliseconds limit = 3000ms) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(5ms);
  }
  return pred();
}

std::string joy(double vx) {
  return ui::encode(ui::JoyMessage{Vec3(vx, 0, 0), 0.0});
}

TEST(UiBridge, MalformedMessagesAreDroppedAndCounted) {
  ui::UiBridge bridge(0);
  bridge.start();
  Client c(bridge.port());
  ASSERT_TRUE(wait_for([&] { return bridge.client_count() == 1; }));
  c.send(R"({"type":"joy","version":1,"v":[NaN,0,0],"w_yaw":0})");
  c.send(R"({"type":"joy","version":1,"v":[1e999,0,0],"w_yaw":0})");
  c.send("garbage");
  ASSERT_TRUE(wait_for([&] { return bridge.malformed_count() == 3; }));
  EXPECT_FALSE(bridge.joystick_inbox().latest());

  c.send(joy(0.75));
  ASSERT_TRUE(wait_for([&] { return bridge.joystick_inbox().latest().has_value(); }));
  EXPECT_EQ(bridge.joystick_inbox().latest()->value.v_joy, Vec3(0.75, 0, 0));
  EXPECT_EQ(bridge.malformed_count(), 3u);
}

TEST(UiBridge, PublishedBundleArrivesInOrder) {
  ui::UiBridge bridge(0);
  bridge.start();
  Client c(bridge.port());
  ASSERT_TRUE(wait_for([&] { return bridge.client_count() == 1; }));
  const std::vector<std::string> bundle = {
      ui::encode(ui::TelemetryMessage{}), ui::encode(ui::EventMessage{1.0, "hello"})};
  bridge.publish(bundle);
  EXPECT_EQ(c.receive(), bundle[0]);
  EXPECT_EQ(c.receive(), bundle[1]);
}

TEST(UiBridge, ClientCountFollowsConnections) {
  ui::UiBridge bridge(0);
  bridge.start();
  {
    Client a(bridge.port());
    Client b(bridge.port());
    EXPECT_TRUE(wait_for([&] { return bridge.client_count() == 2; }));
  }
  EXPECT_TRUE(wait_for([&] { return bridge.client_count() == 0; }));
}

ScenarioConfig live_config(double duration) {
  ScenarioConfig cfg = config_from_json(nlohmann::json{
      {"duration", duration}, {"world", {{"ground", false}}}, {"grid", {{"dims", {64, 64, 32}}}}});
  cfg.joystick.kind = JoystickKind::Live;
  return cfg;
}

TEST(LiveRun, NoClientMeansHover) {
  ui::UiBridge bridge(0);
  bridge.start();
  const ScenarioConfig cfg = live_config(1.0);
  Simulation sim(cfg, std::make_unique<LiveSource>(bridge.joystick_inbox(), 0.5));
  const RunResult r = sim.run();
  ASSERT_EQ(r.joystick.size(), 11u);
  for (const auto& c : r.joystick) EXPECT_EQ(c.v_joy, Vec3::Zero());
  EXPECT_LT((r.trajectory.back().p - cfg.initial_position).norm(), 0.05);
}

// A client streaming at 10 Hz while the simulation runs at wall speed keeps
// the goal moving on every joystick tick; once it stops, the vehicle is
// commanded to hover within the silence timeout.
TEST(LiveRun, StreamingClientThenSilence) {
  ui::UiBridge bridge(0);
  bridge.start();
  const ScenarioConfig cfg = live_config(2.5);
  Simulation sim(cfg, std::make_unique<LiveSource>(bridge.joystick_inbox(), 0.5));

  Client c(bridge.port());
  ASSERT_TRUE(wait_for([&] { return bridge.client_count() == 1; }));
  c.send(joy(1.0));
  ASSERT_TRUE(wait_for([&] { return bridge.joystick_inbox().latest().has_value(); }));

  std::atomic<bool> streaming{true};
  std::thread sender([&] {
    const auto start = std::chrono::steady_clock::now();
    for (int k = 1; streaming; ++k) {
      std::this_thread::sleep_until(start + k * 100ms);
      if (streaming) c.send(joy(1.0));
    }
  });

  const auto start = std::chrono::steady_clock::now();
  while (sim.step()) {
    if (sim.time() >= 1.0) streaming = false;
    std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                              std::chrono::duration<double>(sim.time())));
  }
  sender.join();
  const RunResult r = sim.finish();

  ASSERT_EQ(r.joystick.size(), 26u);
  for (const auto& cmd : r.joystick) {
    if (cmd.stamp <= 1.0) {
      EXPECT_EQ(cmd.v_joy, Vec3(1, 0, 0)) << cmd.stamp;
    }
    if (cmd.stamp >= 1.1 + 0.5 + 0.1) {
      EXPECT_EQ(cmd.v_joy, Vec3::Zero()) << cmd.stamp;
    }
  }
  EXPECT_EQ(bridge.malformed_count(), 0u);
}

}  // namespace
