#pragma once

// WebSocket message schema shared with the operator console.
//
// Every message is a JSON text frame with the envelope
//   {"schema": "cstrans.ws", "version": 1, "type": <type>, ...}
//
// client -> server
//   type "command": {"id": int (optional), "command": {"kind": ..., fields}}
//     kind "apply_wrench":         force [N, world] (3), moment [N m, payload] (3), duration [s]
//     kind "set_human_position":   position [m] (3)
//     kind "set_admittance_gains": mass (6), damping (6), stiffness (6); order x y z roll pitch yaw
//     kind "set_safety_mode":      mode "off"|"gradient"|"optimization", human_clearance [m],
//                                  robot_clearance [m]
//     kind "reset":                seed (unsigned integer)
// server -> client
//   type "frame": {"frame": StateFrame}
//   type "ack":   {"id": int|null, "kind": string}
//   type "error": {"id": int|null, "message": string}

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstrans/commands.hpp"
#include "cstrans/run_log.hpp"

namespace cstrans {

inline constexpr const char* kWsSchema = "cstrans.ws";
inline constexpr int kWsVersion = 1;

struct RobotFrame {
  Vector3 position = Vector3::Zero();
  Vector3 cable_direction = Vector3::Zero();  // robot -> attach point
  double tension_estimate = 0.0;              // N
  double thrust = 0.0;                        // N
};

struct StateFrame {
  long step = 0;
  double time = 0.0;
  Vector3 payload_position = Vector3::Zero();
  Vector3 payload_velocity = Vector3::Zero();
  Vector3 payload_euler = Vector3::Zero();  // yaw, pitch, roll [rad]
  Vector3 payload_omega = Vector3::Zero();
  std::vector<RobotFrame> robots;
  Vector6 estimated_wrench = Vector6::Zero();
  Vector6 applied_wrench = Vector6::Zero();
  Vector6 desired_pose = Vector6::Zero();  // x y z roll pitch yaw
  std::optional<Vector3> human;
  std::optional<double> min_human_distance;
  double min_robot_distance = 0.0;
  std::string safety_mode = "off";
  double human_clearance = 1.0;
  double robot_clearance = 0.75;

  bool operator==(const StateFrame&) const;
};

nlohmann::json command_to_json(const Command& c);
/// Throws MalformedMessage.
Command command_from_json(const nlohmann::json& j);

nlohmann::json frame_to_json(const StateFrame& f);
StateFrame frame_from_json(const nlohmann::json& j);

std::string encode_frame(const StateFrame& f);
/// Throws SchemaVersionMismatch or MalformedMessage.
StateFrame decode_frame(std::string_view text);

struct ClientMessage {
  std::optional<long> id;
  Command command;
};

std::string encode_command(const Command& c, std::optional<long> id = std::nullopt);
/// Throws SchemaVersionMismatch or MalformedMessage; never anything else.
ClientMessage decode_client_message(std::string_view text);

std::string encode_ack(std::optional<long> id, const std::string& kind);
std::string encode_error(std::optional<long> id, const std::string& message);

/// Builds the broadcast frame from a run-log record.
StateFrame frame_from_record(const LogRecord& r, const std::vector<Vector3>& cable_directions,
                             const SafetyParams& safety);

}  // namespace cstrans
