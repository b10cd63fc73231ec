#include "doctest.h"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cstrans/interaction_service.hpp"
#include "cstrans/run_log.hpp"

using namespace cstrans;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1:" + std::to_string(port), "/");
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }

  std::string read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return beast::buffers_to_string(buffer.data());
  }

  // Reads until a non-frame reply arrives; frames seen on the way are kept.
  json read_reply() {
    for (;;) {
      json j = json::parse(read());
      if (j.at("type") != "frame") return j;
      frames.push_back(j.dump());
    }
  }

  // Collects frames until `count` have been seen.
  void collect(std::size_t count) {
    while (frames.size() < count) {
      const std::string text = read();
      if (json::parse(text).at("type") == "frame") frames.push_back(text);
    }
  }

  std::vector<std::string> frames;

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

ScenarioConfig service_config(double duration) {
  ScenarioConfig c;
  c.duration = duration;
  c.seed = 8;
  c.service.port = 0;
  c.service.realtime = false;
  c.service.client_queue = 100000;
  c.service.frame_stride = 10;
  return c;
}

void wait_for_clients(const InteractionService& s, std::size_t n) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
  while (s.client_count() < n && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  REQUIRE(s.client_count() == n);
}

std::string dump(const RunLog& log) {
  std::ostringstream out;
  write_jsonl(log, out);
  return out.str();
}

std::size_t expected_frames(const ScenarioConfig& c) {
  const auto steps = static_cast<std::size_t>(std::llround(c.duration / c.rates.control_dt));
  return (steps + static_cast<std::size_t>(c.service.frame_stride) - 1) /
         static_cast<std::size_t>(c.service.frame_stride);
}

}  // namespace

TEST_CASE("a service without clients reproduces the headless run") {
  const ScenarioConfig cfg = service_config(1.0);
  InteractionService service(cfg);
  CHECK(service.start() != 0);
  const RunLog log = service.run();
  service.stop();
  CHECK(log.commands.empty());
  CHECK(dump(log) == dump(run_scenario(cfg)));
}

TEST_CASE("two clients receive identical frame sequences") {
  const ScenarioConfig cfg = service_config(1.0);
  InteractionService service(cfg);
  const std::uint16_t port = service.start();
  Client a(port), b(port);
  wait_for_clients(service, 2);

  const std::size_t n = expected_frames(cfg);
  std::thread ta([&] { a.collect(n); });
  std::thread tb([&] { b.collect(n); });
  const RunLog log = service.run();
  ta.join();
  tb.join();
  service.stop();

  CHECK(service.dropped_frames() == 0);
  REQUIRE(a.frames.size() == n);
  CHECK(a.frames == b.frames);
  // Frames are decimated records of the run.
  const StateFrame last = decode_frame(a.frames.back());
  CHECK(last.step == static_cast<long>((n - 1) * 10));
  CHECK(last.payload_position == log.records[static_cast<std::size_t>(last.step)].payload_position);
}

TEST_CASE("an applied wrench is reflected in frames and replays headlessly") {
  ScenarioConfig cfg = service_config(4.0);
  InteractionService service(cfg);
  const std::uint16_t port = service.start();
  Client client(port);
  wait_for_clients(service, 1);

  ApplyWrench push;
  push.wrench.force = Vector3(0.5, 0.0, 0.0);
  push.duration = 3.0;
  client.send(encode_command(push, 1));
  const json ack = client.read_reply();
  CHECK(ack.at("type") == "ack");
  CHECK(ack.at("id") == 1);
  CHECK(ack.at("kind") == "apply_wrench");

  // Malformed and out-of-bound commands get an error reply; the connection stays up.
  client.send("{not json");
  CHECK(client.read_reply().at("type") == "error");
  ApplyWrench huge;
  huge.wrench.force = Vector3(0, 0, 50);
  huge.duration = 1.0;
  client.send(encode_command(huge, 2));
  const json err = client.read_reply();
  CHECK(err.at("type") == "error");
  CHECK(err.at("id") == 2);

  const std::size_t n = expected_frames(cfg);
  std::thread reader([&] { client.collect(n); });
  const RunLog log = service.run();
  reader.join();
  service.stop();

  REQUIRE(log.commands.size() == 1);
  CHECK(log.commands[0].step == 0);

  double est_sum = 0.0, x_early = 0.0, x_late = 0.0;
  int est_count = 0;
  for (const std::string& text : client.frames) {
    const StateFrame f = decode_frame(text);
    if (f.time < 3.0 - 1e-9) CHECK(f.applied_wrench(0) == doctest::Approx(0.5));
    if (f.time > 3.0 + 1e-9) CHECK(f.applied_wrench(0) == 0.0);
    if (f.time >= 2.0 && f.time < 3.0) {
      est_sum += f.estimated_wrench(0);
      ++est_count;
    }
    if (std::abs(f.time - 0.5) < 1e-9) x_early = f.payload_position.x();
    if (std::abs(f.time - 2.9) < 1e-9) x_late = f.payload_position.x();
  }
  REQUIRE(est_count > 0);
  CHECK(est_sum / est_count == doctest::Approx(0.5).epsilon(0.1));
  CHECK(x_late - x_early > 0.1);

  // The same command stream replayed headlessly reproduces the run.
  CHECK(dump(run_scenario(cfg, log.commands)) == dump(log));
  CHECK(dump(replay_log(log)) == dump(log));
}

TEST_CASE("stop before run and repeated stop are safe") {
  InteractionService service(service_config(0.5));
  service.start();
  service.stop();
  service.stop();
  const RunLog log = service.run();
  CHECK(log.records.empty());
}

TEST_CASE("binding an occupied port fails") {
  InteractionService first(service_config(0.5));
  const std::uint16_t port = first.start();
  ScenarioConfig cfg = service_config(0.5);
  cfg.service.port = port;
  InteractionService second(cfg);
  CHECK_THROWS_AS(second.start(), Error);
  first.stop();
}
