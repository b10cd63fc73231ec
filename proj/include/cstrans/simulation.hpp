#pragma once

// Closed-loop orchestration: simulator, per-robot filters, wrench estimate,
// admittance, payload controller, allocator and robot controllers.

#include <deque>
#include <memory>
#include <random>
#include <vector>

#include "cstrans/commands.hpp"
#include "cstrans/config.hpp"
#include "cstrans/run_log.hpp"
#include "cstrans/trajectory.hpp"

namespace cstrans {

/// World in which every cable is taut at its static stretch and every
/// quadrotor hovers above its attach point.
WorldState hover_world(const ScenarioConfig& config);

class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Queues a command; it is applied atomically at the next step boundary.
  void submit(const Command& c);

  /// Runs one control step and returns its record. NumericalBlowup carries
  /// the step index in its message.
  LogRecord step();

  /// Commands applied so far, in application order.
  const std::vector<CommandRecord>& applied_commands() const { return applied_; }

  long step_index() const { return step_; }
  double time() const { return world_.time; }
  bool finished() const;
  const WorldState& world() const { return world_; }
  const ScenarioConfig& config() const { return config_; }
  const SafetyParams& safety() const { return allocator_.params(); }
  const SystemParams& params() const { return params_; }
  /// Cable directions of the latest control step (truth, robot -> attach point).
  std::vector<Vector3> cable_directions() const;
  /// Total filter events across robots.
  UkfEvents filter_events() const;
  const std::vector<RobotUkf>& filters() const { return filters_; }

 private:
  void restart(std::uint64_t seed);
  void apply(const Command& c);

  struct TimedWrench {
    Wrench wrench;
    double expires = 0.0;
  };

  ScenarioConfig config_;
  SystemParams params_;
  int substeps_;
  ReferenceTrajectory trajectory_;

  WorldState world_;
  std::mt19937_64 rng_;
  long step_ = 0;
  double epoch_ = 0.0;  // world time of the last reset; scripts run in time since epoch

  PayloadController payload_controller_;
  SafetyAllocator allocator_;
  std::vector<RobotController> robot_controllers_;
  std::vector<RobotUkf> filters_;
  std::vector<UkfInput> last_inputs_;
  std::vector<double> tension_stamps_;
  WrenchEstimator wrench_estimator_;
  WrenchFilter wrench_filter_;
  AdmittanceGains admittance_gains_;
  AdmittanceState admittance_;
  Observation odometry_;
  Vector3 filtered_velocity_ = Vector3::Zero();
  Vector3 filtered_omega_ = Vector3::Zero();
  bool have_odometry_ = false;
  Vector3 previous_payload_velocity_ = Vector3::Zero();

  std::optional<Vector3> human_override_;
  std::vector<TimedWrench> commanded_wrenches_;
  std::deque<Command> pending_;
  std::vector<CommandRecord> applied_;
};

/// Runs a scenario headlessly to its duration. `inject` replays commands at
/// their logged step indices.
RunLog run_scenario(const ScenarioConfig& config, const std::vector<CommandRecord>& inject = {});

/// Re-runs a log headlessly from its header configuration and command lines.
RunLog replay_log(const RunLog& log);

}  // namespace cstrans
