#pragma once

// WebSocket front end for a running simulation. Commands from clients are
// queued and applied at the next control-step boundary; state frames are
// broadcast every `frame_stride` steps.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "cstrans/messages.hpp"
#include "cstrans/simulation.hpp"

namespace cstrans {

class InteractionService {
 public:
  explicit InteractionService(ScenarioConfig config);
  ~InteractionService();

  InteractionService(const InteractionService&) = delete;
  InteractionService& operator=(const InteractionService&) = delete;

  /// Binds the listener and starts the network thread. Port 0 picks a free
  /// port. Returns the bound port.
  std::uint16_t start();

  /// Steps the simulation until its duration elapses or stop() is called.
  /// Applied commands are part of the returned log.
  RunLog run();

  /// Safe to call from any thread.
  void stop();
  /// Only raises the stop flag; safe inside a signal handler. Call stop()
  /// afterwards to close the connections.
  void request_stop() { stop_ = true; }

  std::size_t client_count() const;
  /// Frames discarded because a client queue was full.
  std::uint64_t dropped_frames() const { return dropped_frames_.load(); }
  const Simulation& simulation() const { return sim_; }

  struct Impl;

 private:
  ScenarioConfig config_;
  Simulation sim_;
  std::unique_ptr<Impl> impl_;
  std::thread io_thread_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> shutdown_{false};
  std::atomic<std::uint64_t> dropped_frames_{0};
};

}  // namespace cstrans
