#pragma once

// Scenario builders shared by the unit and acceptance tests.

#include <cmath>

#include "cstrans/config.hpp"

namespace cstrans::testing {

inline ScenarioConfig hover_config(double duration = 10.0, std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.duration = duration;
  c.seed = seed;
  return c;
}

inline ScenarioConfig zero_noise(ScenarioConfig c) {
  c.sensor_noise = MeasurementNoise{};
  return c;
}

/// Step wrench on one admittance axis from t = onset, with that axis'
/// virtual mass and damping set and no stiffness anywhere.
inline ScenarioConfig impedance_config(int axis, double value, double mass, double damping,
                                       double onset, double duration) {
  ScenarioConfig c;
  c.duration = duration;
  c.admittance.gains.mass(axis) = mass;
  c.admittance.gains.damping(axis) = damping;
  c.admittance.gains.stiffness.setZero();
  WrenchEvent e;
  e.start = onset;
  e.duration = duration;
  if (axis < 3) {
    e.force(axis) = value;
  } else {
    e.moment(axis - 3) = value;
  }
  c.wrench_script.push_back(e);
  return c;
}

/// Simultaneous step force on x and step moment on yaw; the two admittance
/// axes are decoupled so one run checks one damping value of each.
inline ScenarioConfig impedance_pair_config(double damping_x, double damping_yaw, double onset,
                                            double duration) {
  ScenarioConfig c = impedance_config(0, 0.5, 0.25, damping_x, onset, duration);
  c.admittance.gains.mass(5) = 0.1;
  c.admittance.gains.damping(5) = damping_yaw;
  c.wrench_script.front().moment.z() = 0.05;
  return c;
}

/// Sequential pulls on all six axes, separated by rest intervals. Rotational
/// axes get a soft spring so the payload tilts only a few degrees.
inline ScenarioConfig pull_config(double force = 0.5, double moment = 0.05) {
  ScenarioConfig c;
  c.admittance.gains.stiffness << 1.2, 1.2, 1.2, 0.5, 0.5, 0.5;
  c.admittance.gains.damping << 5.0, 5.0, 5.0, 0.5, 0.5, 0.5;
  const double on = 2.0, off = 1.5;
  double t = 1.0;
  for (int axis = 0; axis < 6; ++axis) {
    WrenchEvent e;
    e.start = t;
    e.duration = on;
    if (axis < 3) {
      e.force(axis) = force;
    } else {
      e.moment(axis - 3) = moment;
    }
    c.wrench_script.push_back(e);
    t += on + off;
  }
  c.duration = t;
  return c;
}

/// Human at robot height walking in from +x until it stands `closest` from
/// the outermost robot of the hovering team; then it stays.
inline ScenarioConfig approach_config(SafetyMode mode, double closest = 0.5, double duration = 12.0) {
  ScenarioConfig c;
  c.duration = duration;
  c.safety.mode = mode;
  c.safety.human_clearance = 1.0;
  c.safety.robot_clearance = 0.75;
  const double z = c.initial.payload_position.z() + c.team.cable_length;
  const double stop = c.team.attach_radius + closest;
  c.human_path = {{0.0, Vector3(stop + 2.5, 0.0, z)}, {8.0, Vector3(stop, 0.0, z)}};
  // A gentle side pull so tracking is exercised during the approach.
  WrenchEvent e;
  e.start = 2.0;
  e.duration = 3.0;
  e.force = Vector3(0.0, 0.3, 0.0);
  c.wrench_script.push_back(e);
  c.admittance.gains.stiffness.head<3>().setConstant(1.2);
  return c;
}

/// Payload following a straight x path with spring-loaded admittance; a side
/// push is applied mid-trajectory and released at `release`.
inline ScenarioConfig correction_config(double push = 0.5, double onset = 4.0, double release = 9.0,
                                        double duration = 20.0) {
  ScenarioConfig c;
  c.duration = duration;
  c.admittance.gains.mass.head<3>().setConstant(0.25);
  c.admittance.gains.damping.head<3>().setConstant(5.0);
  c.admittance.gains.stiffness << 1.2, 1.2, 1.2, 0.0, 0.0, 0.0;
  c.trajectory.kind = TrajectorySpec::Kind::Waypoints;
  c.trajectory.waypoints = {{0.0, Vector3(0.0, 0.0, 1.0), 0.0}, {duration, Vector3(4.0, 0.0, 1.0), 0.0}};
  WrenchEvent e;
  e.start = onset;
  e.duration = release - onset;
  e.force = Vector3(0.0, push, 0.0);
  c.wrench_script.push_back(e);
  return c;
}

}  // namespace cstrans::testing
