#pragma once

#include "cstrans/types.hpp"

namespace cstrans {

/// Diagonal gains of the payload pose controller. The integral clamp bounds
/// the integral force contribution m_L K_i int(e_x) per axis, in newtons.
struct PayloadGains {
  Vector3 kp = Vector3::Constant(12.0);
  Vector3 kd = Vector3::Constant(6.0);
  Vector3 ki = Vector3::Constant(8.0);
  Vector3 k_rot = Vector3::Constant(0.3);
  Vector3 k_omega = Vector3::Constant(0.12);
  double integral_clamp = 2.0;
};

struct PayloadReference {
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();
  Vector3 acceleration = Vector3::Zero();
  Rotation rotation = Rotation::Identity();
  Vector3 angular_velocity = Vector3::Zero();
  Vector3 angular_acceleration = Vector3::Zero();
};

struct PayloadControlOutput {
  Wrench wrench;
  Vector3 commanded_acceleration = Vector3::Zero();  // a_L,c, gravity included
  Vector3 position_error = Vector3::Zero();
  Vector3 attitude_error = Vector3::Zero();
};

/// Geometric pose controller of the payload. Holds the integral accumulator.
class PayloadController {
 public:
  PayloadController(PayloadGains gains, double payload_mass, Matrix3 payload_inertia,
                    double gravity = kGravity);

  /// Desired payload wrench; dt > 0 advances the integral term.
  PayloadControlOutput desired_wrench(const PayloadState& state, const PayloadReference& ref,
                                      double dt);

  void reset() { integral_.setZero(); }
  const Vector3& integral() const { return integral_; }
  const PayloadGains& gains() const { return gains_; }
  void set_gains(const PayloadGains& gains) { gains_ = gains; }

 private:
  PayloadGains gains_;
  double mass_;
  Matrix3 inertia_;
  double gravity_;
  Vector3 integral_ = Vector3::Zero();
};

}  // namespace cstrans
