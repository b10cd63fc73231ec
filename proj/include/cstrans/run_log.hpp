#pragma once

// Run log: a JSONL stream with one header line, one record per control step
// and one line per applied operator command.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstrans/commands.hpp"
#include "cstrans/config.hpp"

namespace cstrans {

inline constexpr const char* kLogSchema = "cstrans.log";
inline constexpr int kLogVersion = 1;

struct RobotRecord {
  Vector3 position = Vector3::Zero();         // truth
  Vector3 position_estimate = Vector3::Zero();
  double tension_true = 0.0;
  double tension_estimate = 0.0;
  Vector3 tension_vector_true = Vector3::Zero();      // on the payload
  Vector3 tension_vector_estimate = Vector3::Zero();  // on the payload
  Vector3 tension_desired = Vector3::Zero();          // mu_des, on the payload
  double thrust = 0.0;
  Vector3 moment = Vector3::Zero();
  bool saturated = false;
};

struct LogRecord {
  long step = 0;
  double time = 0.0;

  Vector3 payload_position = Vector3::Zero();
  Vector3 payload_velocity = Vector3::Zero();
  Vector3 payload_euler = Vector3::Zero();  // yaw, pitch, roll
  Vector3 payload_omega = Vector3::Zero();  // payload frame

  Vector6 reference_pose = Vector6::Zero();  // x y z roll pitch yaw
  Vector6 desired_pose = Vector6::Zero();    // after admittance
  Vector6 desired_velocity = Vector6::Zero();

  Vector6 applied_wrench = Vector6::Zero();
  Vector6 estimated_wrench_raw = Vector6::Zero();
  Vector6 estimated_wrench = Vector6::Zero();  // filtered, drives the admittance
  Vector3 quasi_static_residual = Vector3::Zero();  // m_L a_L neglected by the estimate
  bool wrench_stale = false;

  std::optional<Vector3> human;
  std::optional<double> min_human_distance;
  double min_robot_distance = 0.0;

  double allocation_objective = 0.0;
  double nullspace_residual = 0.0;
  double wrench_residual = 0.0;
  double human_slack = 0.0;
  double robot_slack = 0.0;
  std::string solver_status;
  int solver_iterations = 0;
  bool allocation_degenerate = false;
  bool allocation_infeasible = false;

  std::string safety_mode;
  std::vector<RobotRecord> robots;
};

struct CommandRecord {
  long step = 0;     // control step at whose boundary the command was applied
  double time = 0.0;
  nlohmann::json command;  // message-schema encoding
};

struct RunLog {
  nlohmann::json header;
  std::vector<LogRecord> records;
  std::vector<CommandRecord> commands;
};

nlohmann::json record_to_json(const LogRecord& r);
LogRecord record_from_json(const nlohmann::json& j);

nlohmann::json make_log_header(const ScenarioConfig& config);

/// Commands are written just before the record of the step they applied at.
void write_jsonl(const RunLog& log, std::ostream& out);
void write_jsonl(const RunLog& log, const std::string& path);
/// Throws ConfigError on an unreadable or malformed log.
RunLog read_jsonl(const std::string& path);
RunLog read_jsonl(std::istream& in);

/// Flat per-step table for plotting.
void write_csv(const RunLog& log, std::ostream& out);
void write_csv(const RunLog& log, const std::string& path);

}  // namespace cstrans
