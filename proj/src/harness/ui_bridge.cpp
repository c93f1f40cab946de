#include "canopy/harness/ui_bridge.hpp"

#include <chrono>
#include <deque>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "canopy/harness/ui_protocol.hpp"

namespace canopy::harness::ui {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr auto kPollPeriod = std::chrono::milliseconds(20);

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Mailbox<planner::JoystickCommand>& inbox,
          const Mailbox<std::vector<std::string>>& outbox, std::atomic<std::uint64_t>& malformed,
          std::atomic<std::size_t>& clients)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        inbox_(inbox),
        outbox_(outbox),
        malformed_(malformed),
        clients_(clients) {}

  ~Session() {
    if (open_) --clients_;
  }

  void run() {
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      ++self->clients_;
      self->do_read();
      self->schedule_poll();
    });
  }

 private:
  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (const auto cmd = parse_joy(text)) {
        self->inbox_.put(*cmd);
      } else {
        ++self->malformed_;
      }
      self->do_read();
    });
  }

  void schedule_poll() {
    timer_.expires_after(kPollPeriod);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->poll_outbox();
      self->schedule_poll();
    });
  }

  void poll_outbox() {
    if (writing_) return;
    const auto entry = outbox_.latest();
    if (!entry || entry->seq == sent_seq_) return;
    sent_seq_ = entry->seq;
    pending_.assign(entry->value.begin(), entry->value.end());
    do_write();
  }

  void do_write() {
    if (pending_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(pending_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        self->writing_ = false;
                        return;
                      }
                      self->pending_.pop_front();
                      self->do_write();
                    });
  }

  websocket::stream<tcp::socket> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  Mailbox<planner::JoystickCommand>& inbox_;
  const Mailbox<std::vector<std::string>>& outbox_;
  std::atomic<std::uint64_t>& malformed_;
  std::atomic<std::size_t>& clients_;
  std::deque<std::string> pending_;
  std::uint64_t sent_seq_ = 0;
  bool writing_ = false;
  bool closed_ = false;
  bool open_ = false;
};

}  // namespace

struct UiBridge::Impl {
  asio::io_context io;
  tcp::acceptor acceptor;
  explicit Impl(unsigned short port) : acceptor(io, tcp::endpoint(tcp::v4(), port)) {}
};

namespace {

void do_accept(UiBridge::Impl& impl, Mailbox<planner::JoystickCommand>& inbox,
               const Mailbox<std::vector<std::string>>& outbox,
               std::atomic<std::uint64_t>& malformed, std::atomic<std::size_t>& clients) {
  impl.acceptor.async_accept([&impl, &inbox, &outbox, &malformed, &clients](beast::error_code ec,
                                                                          tcp::socket socket) {
    if (ec) return;
    std::make_shared<Session>(std::move(socket), inbox, outbox, malformed, clients)->run();
    do_accept(impl, inbox, outbox, malformed, clients);
  });
}

}  // namespace

UiBridge::UiBridge(unsigned short port) : impl_(std::make_unique<Impl>(port)) {}

UiBridge::~UiBridge() { stop(); }

unsigned short UiBridge::port() const { return impl_->acceptor.local_endpoint().port(); }

void UiBridge::start() {
  if (thread_.joinable()) return;
  do_accept(*impl_, inbox_, outbox_, malformed_, clients_);
  thread_ = std::thread([this] { impl_->io.run(); });
}

void UiBridge::stop() {
  if (!thread_.joinable()) return;
  impl_->io.stop();
  thread_.join();
}

void UiBridge::publish(std::vector<std::string> bundle) { outbox_.put(std::move(bundle)); }

}  // namespace canopy::harness::ui
