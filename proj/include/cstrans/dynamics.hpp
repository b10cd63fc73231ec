#pragma once

// Ground-truth physics of the cable-suspended team: rigid payload, n rigid
// quadrotors, unilateral spring-damper cables, gravity and an applied wrench.

#include <array>
#include <random>
#include <span>
#include <vector>

#include "cstrans/types.hpp"

namespace cstrans {

/// Force exerted by cable k on its quadrotor. Zero when slack; otherwise a
/// spring-damper pull toward the attach point, never a push.
Vector3 cable_tension_truth(const Vector3& quad_position, const Vector3& quad_velocity,
                            const Vector3& attach_position, const Vector3& attach_velocity,
                            const CableParams& cable);

using MotorSpeeds = std::array<double, 4>;

/// f = sum k_f w^2.
double motor_thrust(const MotorSpeeds& speeds, double motor_constant);
/// Equal split w = sqrt(f / (4 k_f)); throws NegativeThrust for f < 0.
MotorSpeeds speeds_for_thrust(double thrust, double motor_constant);

/// World-frame attach point position and velocity of cable k.
Vector3 attach_position(const PayloadState& payload, const CableParams& cable);
Vector3 attach_velocity(const PayloadState& payload, const CableParams& cable);

/// Rates of one rigid body; `omega` is the body rate driving the rotation.
struct BodyRate {
  Vector3 velocity = Vector3::Zero();
  Vector3 acceleration = Vector3::Zero();
  Vector3 omega = Vector3::Zero();
  Vector3 angular_acceleration = Vector3::Zero();
};

struct WorldRate {
  BodyRate payload;
  std::vector<BodyRate> quads;
};

WorldRate derivatives(const WorldState& world, std::span<const RobotCommand> controls,
                      const SystemParams& params);

/// Classical RK4 with rotations advanced on SO(3) (Munthe-Kaas form, truncated
/// dexp^{-1}). dt must lie in (0, 0.01]; throws NumericalBlowup on divergence.
WorldState step_rk4(const WorldState& world, std::span<const RobotCommand> controls,
                    const SystemParams& params, double dt);

/// Kinetic + gravitational + cable spring energy (gravity reference z = 0).
double mechanical_energy(const WorldState& world, const SystemParams& params);

/// Ground-truth cable force acting on each quadrotor.
std::vector<Vector3> cable_forces_on_quads(const WorldState& world, const SystemParams& params);

/// Zero-mean Gaussian noise levels (standard deviations) of the motion-capture feed.
struct MeasurementNoise {
  double position = 0.0;       // m
  double velocity = 0.0;       // m/s
  double angle = 0.0;          // rad, per Euler component / payload rotation vector
  double angular_rate = 0.0;   // rad/s
  double cable_direction = 0.0;
  double cable_rate = 0.0;     // 1/s
  double payload_position = 0.0;
  double payload_velocity = 0.0;
  double payload_angle = 0.0;
  double payload_angular_rate = 0.0;
};

/// 18-dim per-robot measurement: everything in the filter state but tension.
struct Measurement {
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();
  EulerZYX euler;
  Vector3 angular_velocity = Vector3::Zero();
  Vector3 cable_direction = Vector3::Zero();  // robot -> attach point, unit
  Vector3 cable_rate = Vector3::Zero();
  bool slack = false;

  Eigen::Matrix<double, 18, 1> vector() const;
};

struct Observation {
  std::vector<Measurement> robots;
  PayloadState payload;
};

/// Noise-free measurement of robot k: q = (p_att - x)/|.|, qdot = (v_att - v)/l.
Measurement measure_robot(const WorldState& world, const SystemParams& params, std::size_t k);

Observation observe(const WorldState& world, const SystemParams& params,
                    const MeasurementNoise& noise, std::mt19937_64& rng);

}  // namespace cstrans
