#pragma once

// Scenario configuration. Loaded from strict JSON: every section is optional,
// unknown keys are errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstrans/dynamics.hpp"
#include "cstrans/payload_controller.hpp"
#include "cstrans/robot_controller.hpp"
#include "cstrans/safety_allocator.hpp"
#include "cstrans/ukf.hpp"
#include "cstrans/wrench_admittance.hpp"

namespace cstrans {

struct RateConfig {
  double sim_dt = 5e-4;
  double control_dt = 2.5e-3;
  int measurement_divisor = 4;  // control steps per measurement

  /// Sim steps per control step; throws ConfigError unless an integer >= 1.
  int substeps() const;
};

struct TeamConfig {
  int n = 3;
  double attach_radius = 0.5;
  std::vector<Vector3> attach_offsets;  // overrides the regular layout when non-empty
  double payload_mass = 0.31;
  Vector3 payload_inertia = Vector3(0.02, 0.02, 0.04);
  double quad_mass = 0.25;
  Vector3 quad_inertia = Vector3(2.1e-3, 2.1e-3, 4.0e-3);
  double motor_constant = 1.5e-6;
  double cable_length = 1.0;
  double cable_stiffness = 5000.0;
  double cable_damping = 20.0;
};

struct InitialConfig {
  Vector3 payload_position = Vector3(0.0, 0.0, 1.0);
  double payload_yaw = 0.0;
};

struct RobotControlConfig {
  CableGains gains;
  double f_max = 8.0;
  double filter_hz = 20.0;
};

struct AdmittanceConfig {
  bool enabled = true;
  AdmittanceGains gains;
  double wrench_filter_hz = 10.0;  // <= 0 disables the filter
};

struct EstimatorConfig {
  UkfNoise process_std = NoiseConfig::defaults().process_std;
  std::optional<UkfMeasurement> measurement_std;  // defaults to the sensor noise
  std::optional<double> tension_prior;            // defaults to m_L g / n
  double tension_prior_std = 0.3;
  /// Low-pass on the measured payload velocity and angular rate before the
  /// payload controller; <= 0 passes the raw measurement through.
  double payload_rate_filter_hz = 4.0;
  RotationUpdate rotation_update = RotationUpdate::Spatial;
  UkfParams params;
};

struct WaypointSpec {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
  double yaw = 0.0;
};

/// Polynomial in local segment time per axis (x, y, z, yaw), lowest order first.
struct PolynomialSegment {
  double duration = 1.0;
  std::vector<double> x, y, z, yaw;
};

struct TrajectorySpec {
  enum class Kind { Hover, Waypoints, Polynomial };
  Kind kind = Kind::Hover;
  Vector3 hover_position = Vector3(0.0, 0.0, 1.0);
  double hover_yaw = 0.0;
  std::vector<WaypointSpec> waypoints;
  double polynomial_start = 0.0;
  std::vector<PolynomialSegment> segments;
};

/// Wrench applied to the payload over [start, start + duration). Force in
/// the world frame, moment in the payload frame.
struct WrenchEvent {
  double start = 0.0;
  double duration = 0.0;
  Vector3 force = Vector3::Zero();
  Vector3 moment = Vector3::Zero();
};

struct HumanPathPoint {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8765;
  int frame_stride = 10;   // control steps per broadcast frame
  int client_queue = 64;   // frames buffered per client before dropping
  double max_force = 20.0;
  double max_moment = 2.0;
  bool realtime = true;
};

struct OutputConfig {
  std::string log;
  std::string csv;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  double duration = 10.0;
  RateConfig rates;
  TeamConfig team;
  InitialConfig initial;
  PayloadGains payload_gains;
  RobotControlConfig robot;
  AdmittanceConfig admittance;
  EstimatorConfig estimator;
  MeasurementNoise sensor_noise = default_sensor_noise();
  SafetyParams safety;
  TrajectorySpec trajectory;
  std::vector<WrenchEvent> wrench_script;
  std::vector<HumanPathPoint> human_path;  // empty: no human in the scene
  ServiceConfig service;
  OutputConfig output;

  static MeasurementNoise default_sensor_noise();

  /// Throws ConfigError on any inconsistency.
  void validate() const;

  SystemParams system_params() const;
  std::vector<Vector3> attach_offsets() const;
  NoiseConfig ukf_noise() const;
  UkfModel ukf_model() const;
};

/// Throws ConfigError on malformed JSON, wrong types or unknown keys.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ScenarioConfig& c);

/// Small JSON helpers shared by the log and message codecs.
nlohmann::json to_json_vec(const Eigen::VectorXd& v);
Eigen::VectorXd from_json_vec(const nlohmann::json& j, Eigen::Index size, const std::string& what);

}  // namespace cstrans
