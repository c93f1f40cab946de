#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "canopy/harness/mailbox.hpp"
#include "canopy/planner/joystick.hpp"

namespace canopy::harness::ui {

/// WebSocket server for the pilot UI. Runs its own I/O thread and touches
/// the simulation only through two single-slot mailboxes: the latest
/// joystick command in and the latest outbound bundle of encoded messages.
/// Slow clients skip bundles rather than queue them.
class UiBridge {
 public:
  /// Binds to `port` on all interfaces; port 0 picks a free port.
  explicit UiBridge(unsigned short port);
  ~UiBridge();
  UiBridge(const UiBridge&) = delete;
  UiBridge& operator=(const UiBridge&) = delete;

  void start();
  void stop();
  unsigned short port() const;

  void publish(std::vector<std::string> bundle);
  const Mailbox<planner::JoystickCommand>& joystick_inbox() const { return inbox_; }

  /// Client frames that were not valid joy messages.
  std::uint64_t malformed_count() const { return malformed_.load(); }
  std::size_t client_count() const { return clients_.load(); }

  struct Impl;

 private:
  // Sessions refer to the mailboxes and counters, so the I/O state is
  // declared last and destroyed first.
  Mailbox<planner::JoystickCommand> inbox_;
  Mailbox<std::vector<std::string>> outbox_;
  std::atomic<std::uint64_t> malformed_{0};
  std::atomic<std::size_t> clients_{0};
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace canopy::harness::ui
