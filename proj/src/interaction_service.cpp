#include "cstrans/interaction_service.hpp"

#include <chrono>
#include <deque>
#include <iostream>
#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace cstrans {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Session;

struct Outgoing {
  std::string text;
  bool droppable = false;
};

}  // namespace

struct InteractionService::Impl {
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;

  mutable std::mutex mutex;
  std::vector<std::weak_ptr<Session>> sessions;
  std::deque<Command> inbox;

  CommandBounds bounds;
  std::size_t client_queue = 64;
  std::atomic<std::uint64_t>* dropped = nullptr;

  void accept();
  void broadcast(const std::string& text);
};

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, InteractionService::Impl& owner)
      : ws_(std::move(socket)), owner_(owner) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(beast::bind_front_handler(&Session::on_accept, shared_from_this()));
  }

  // Called from any thread.
  void send(std::string text, bool droppable) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text), droppable]() mutable {
      self->enqueue({std::move(text), droppable});
    });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      self->open_ = false;
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

  bool open() const { return open_; }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    open_ = true;
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      open_ = false;
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::optional<long> id;
    try {
      ClientMessage m = decode_client_message(text);
      id = m.id;
      validate_command(m.command, owner_.bounds);
      {
        std::lock_guard lock(owner_.mutex);
        owner_.inbox.push_back(m.command);
      }
      enqueue({encode_ack(id, command_name(m.command)), false});
    } catch (const Error& e) {
      enqueue({encode_error(id, e.what()), false});
    }
    read();
  }

  void enqueue(Outgoing msg) {
    if (!open_) return;
    if (msg.droppable) {
      std::size_t frames = 0;
      for (const auto& q : queue_) frames += q.droppable ? 1 : 0;
      if (frames >= owner_.client_queue) {
        // Oldest frame not already in flight.
        for (auto it = queue_.begin() + (writing_ ? 1 : 0); it != queue_.end(); ++it) {
          if (it->droppable) {
            queue_.erase(it);
            if (owner_.dropped) ++*owner_.dropped;
            break;
          }
        }
      }
    }
    queue_.push_back(std::move(msg));
    if (!writing_) write();
  }

  void write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front().text),
                    beast::bind_front_handler(&Session::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) {
      open_ = false;
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  InteractionService::Impl& owner_;
  beast::flat_buffer buffer_;
  std::deque<Outgoing> queue_;
  bool writing_ = false;
  bool open_ = false;
};

}  // namespace

void InteractionService::Impl::accept() {
  acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto s = std::make_shared<Session>(std::move(socket), *this);
    {
      std::lock_guard lock(mutex);
      sessions.push_back(s);
    }
    s->start();
    accept();
  });
}

void InteractionService::Impl::broadcast(const std::string& text) {
  std::lock_guard lock(mutex);
  std::erase_if(sessions, [](const std::weak_ptr<Session>& w) { return w.expired(); });
  for (auto& w : sessions) {
    if (auto s = w.lock()) s->send(text, true);
  }
}

InteractionService::InteractionService(ScenarioConfig config)
    : config_(std::move(config)), sim_(config_), impl_(std::make_unique<Impl>()) {
  impl_->bounds.max_force = config_.service.max_force;
  impl_->bounds.max_moment = config_.service.max_moment;
  impl_->client_queue = static_cast<std::size_t>(config_.service.client_queue);
  impl_->dropped = &dropped_frames_;
}

InteractionService::~InteractionService() {
  stop();
  if (io_thread_.joinable()) io_thread_.join();
}

std::uint16_t InteractionService::start() {
  if (impl_->acceptor) throw Error("interaction service already started");
  beast::error_code ec;
  const auto address = net::ip::make_address(config_.service.host, ec);
  if (ec) throw ConfigError("service.host: " + ec.message());
  const tcp::endpoint endpoint(address, static_cast<std::uint16_t>(config_.service.port));
  tcp::acceptor acceptor(impl_->ioc);
  acceptor.open(endpoint.protocol(), ec);
  if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acceptor.bind(endpoint, ec);
  if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error("cannot listen on " + config_.service.host + ":" +
                      std::to_string(config_.service.port) + ": " + ec.message());
  const std::uint16_t port = acceptor.local_endpoint().port();
  impl_->acceptor.emplace(std::move(acceptor));
  impl_->work.emplace(net::make_work_guard(impl_->ioc));
  impl_->accept();
  io_thread_ = std::thread([this] { impl_->ioc.run(); });
  return port;
}

RunLog InteractionService::run() {
  using Clock = std::chrono::steady_clock;
  RunLog log;
  log.header = make_log_header(config_);
  const long stride = std::max(1, config_.service.frame_stride);
  const auto period = std::chrono::duration<double>(config_.rates.control_dt);
  const auto t0 = Clock::now();
  long steps = 0;
  while (!stop_.load() && !sim_.finished()) {
    {
      std::lock_guard lock(impl_->mutex);
      while (!impl_->inbox.empty()) {
        sim_.submit(impl_->inbox.front());
        impl_->inbox.pop_front();
      }
    }
    const long index = sim_.step_index();
    LogRecord record = sim_.step();
    if (index % stride == 0) {
      impl_->broadcast(encode_frame(frame_from_record(record, sim_.cable_directions(), sim_.safety())));
    }
    log.records.push_back(std::move(record));
    ++steps;
    if (config_.service.realtime) {
      std::this_thread::sleep_until(t0 + std::chrono::duration_cast<Clock::duration>(period * steps));
    }
  }
  log.commands = sim_.applied_commands();
  return log;
}

void InteractionService::stop() {
  stop_ = true;
  if (!impl_->acceptor || shutdown_.exchange(true)) return;
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor->close(ec);
    std::lock_guard lock(impl_->mutex);
    for (auto& w : impl_->sessions) {
      if (auto s = w.lock()) s->close();
    }
    impl_->work.reset();
  });
}

std::size_t InteractionService::client_count() const {
  std::lock_guard lock(impl_->mutex);
  std::size_t n = 0;
  for (const auto& w : impl_->sessions) {
    if (auto s = w.lock(); s && s->open()) ++n;
  }
  return n;
}

}  // namespace cstrans
