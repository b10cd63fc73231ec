#pragma once

// Operator commands injected into a running simulation.

#include <cstdint>
#include <string>
#include <variant>

#include "cstrans/safety_allocator.hpp"
#include "cstrans/wrench_admittance.hpp"

namespace cstrans {

/// Wrench on the payload for `duration` seconds, then automatically removed.
struct ApplyWrench {
  Wrench wrench;
  double duration = 0.0;
};

struct SetHumanPosition {
  Vector3 position = Vector3::Zero();
};

struct SetAdmittanceGains {
  AdmittanceGains gains;
};

struct SetSafetyMode {
  SafetyMode mode = SafetyMode::Off;
  double human_clearance = 1.0;
  double robot_clearance = 0.75;
};

struct ResetCommand {
  std::uint64_t seed = 1;
};

using Command = std::variant<ApplyWrench, SetHumanPosition, SetAdmittanceGains, SetSafetyMode, ResetCommand>;

struct CommandBounds {
  double max_force = 20.0;   // N
  double max_moment = 2.0;   // N m
  double max_duration = 60.0;
};

/// Throws MalformedMessage when a command is outside the bounds.
void validate_command(const Command& c, const CommandBounds& bounds);

const char* command_name(const Command& c);

}  // namespace cstrans
