#pragma once

// Per-robot tension tracking: cable-direction geometric control producing a
// desired force, then an SO(3) attitude loop producing (f, M).

#include "cstrans/types.hpp"

namespace cstrans {

struct CableGains {
  Vector3 k_q = Vector3::Constant(25.0);
  Vector3 k_omega = Vector3::Constant(8.0);
  Vector3 k_R = Vector3::Constant(1.5);
  Vector3 k_Omega = Vector3::Constant(0.1);
};

struct DesiredCable {
  Vector3 q_des = -Vector3::UnitZ();
  Vector3 q_dot_des = Vector3::Zero();
  Vector3 omega_des = Vector3::Zero();  // q_des x q_dot_des
};

/// q_des = -mu/|mu|. Throws DegenerateTension when |mu| <= 1e-6.
Vector3 desired_direction(const Vector3& mu_des);

/// First-order low-pass differentiator of q_des across control steps.
class DesiredCableFilter {
 public:
  explicit DesiredCableFilter(double cutoff_hz = 20.0) : cutoff_hz_(cutoff_hz) {}

  /// Throws DegenerateTension (state untouched) for a degenerate mu_des.
  DesiredCable update(const Vector3& mu_des, double dt);
  void reset() { initialized_ = false; }

 private:
  double cutoff_hz_;
  bool initialized_ = false;
  Vector3 previous_ = Vector3::Zero();
  Vector3 rate_ = Vector3::Zero();
};

struct CableForce {
  Vector3 parallel = Vector3::Zero();
  Vector3 perpendicular = Vector3::Zero();
  Vector3 total = Vector3::Zero();
  Vector3 e_q = Vector3::Zero();
  Vector3 e_omega = Vector3::Zero();
};

/// Desired force on robot k. q is the unit direction robot -> attach point,
/// mu_des the desired force on the payload, a_c the commanded attach-point
/// acceleration with gravity compensation included.
CableForce cable_force(const Vector3& q, const Vector3& q_dot, const DesiredCable& des,
                       const Vector3& mu_des, const Vector3& a_c, double mass, double length,
                       const CableGains& gains);

/// Body z along F, heading yaw. Throws DegenerateForce when |F| <= 1e-6.
Rotation desired_attitude(const Vector3& force, double yaw);

struct AttitudeCommand {
  RobotCommand command;
  Rotation r_des = Rotation::Identity();
  Vector3 e_R = Vector3::Zero();
  Vector3 e_Omega = Vector3::Zero();
  bool saturated = false;
};

/// f = F . R e3 clamped to [0, f_max]; geometric moment with feedforward
/// (desired angular acceleration taken as zero).
AttitudeCommand attitude_thrust(const Vector3& force, const Rotation& r, const Vector3& omega,
                                double yaw_des, const Vector3& omega_des, const Matrix3& inertia,
                                const CableGains& gains, double f_max);

/// Estimated state the controller consumes (UKF mean).
struct RobotEstimate {
  Rotation rotation = Rotation::Identity();
  Vector3 angular_velocity = Vector3::Zero();
  Vector3 cable_direction = -Vector3::UnitZ();
  Vector3 cable_rate = Vector3::Zero();
};

struct RobotControlOutput {
  RobotCommand command;
  CableForce force;
  DesiredCable desired;
  Rotation r_des = Rotation::Identity();
  bool saturated = false;
  bool degenerate_tension = false;
  bool degenerate_force = false;
};

class RobotController {
 public:
  RobotController(CableGains gains, double mass, Matrix3 inertia, double cable_length,
                  double f_max = 8.0, double gravity = kGravity, double filter_hz = 20.0);

  RobotControlOutput compute(const RobotEstimate& est, const Vector3& mu_des, const Vector3& a_c,
                             double yaw_des, double dt);

  void reset();
  const CableGains& gains() const { return gains_; }
  void set_gains(const CableGains& gains) { gains_ = gains; }

 private:
  CableGains gains_;
  double mass_;
  Matrix3 inertia_;
  double length_;
  double f_max_;
  double gravity_;
  double filter_hz_;
  DesiredCableFilter cable_filter_;
  DesiredCable last_desired_;
  bool have_r_des_ = false;
  Rotation previous_r_des_ = Rotation::Identity();
  Vector3 omega_des_ = Vector3::Zero();
};

}  // namespace cstrans
