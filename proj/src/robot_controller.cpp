#include "cstrans/robot_controller.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace cstrans {

namespace {
constexpr double kEpsilon = 1e-6;

double lowpass_alpha(double cutoff_hz, double dt) {
  const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
  return dt / (dt + tau);
}
}  // namespace

Vector3 desired_direction(const Vector3& mu_des) {
  const double norm = mu_des.norm();
  if (!(norm > kEpsilon)) throw DegenerateTension();
  return -mu_des / norm;
}

DesiredCable DesiredCableFilter::update(const Vector3& mu_des, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("DesiredCableFilter: dt must be positive");
  const Vector3 q = desired_direction(mu_des);
  if (!initialized_) {
    initialized_ = true;
    rate_.setZero();
  } else {
    const double alpha = lowpass_alpha(cutoff_hz_, dt);
    rate_ += alpha * ((q - previous_) / dt - rate_);
  }
  previous_ = q;
  // The derivative of a unit vector is tangent to the sphere.
  const Vector3 q_dot = rate_ - q * q.dot(rate_);
  return {q, q_dot, q.cross(q_dot)};
}

CableForce cable_force(const Vector3& q, const Vector3& q_dot, const DesiredCable& des,
                       const Vector3& mu_des, const Vector3& a_c, double mass, double length,
                       const CableGains& gains) {
  CableForce out;
  const Matrix3 qq = q * q.transpose();
  const Matrix3 qh = hat(q);
  const Matrix3 qh2 = qh * qh;
  const Vector3 omega = q.cross(q_dot);

  out.e_q = des.q_des.cross(q);
  out.e_omega = omega + qh2 * des.omega_des;

  out.parallel = qq * mu_des + mass * length * omega.squaredNorm() * q + mass * qq * a_c;
  // Desired angular acceleration of the cable is not available; taken as zero.
  const Vector3 bracket = -gains.k_q.cwiseProduct(out.e_q) - gains.k_omega.cwiseProduct(out.e_omega) -
                          q.dot(des.omega_des) * des.q_dot_des;
  out.perpendicular = mass * length * qh * bracket - mass * qh2 * a_c;
  out.total = out.parallel + out.perpendicular;
  return out;
}

Rotation desired_attitude(const Vector3& force, double yaw) {
  const double norm = force.norm();
  if (!(norm > kEpsilon)) throw DegenerateForce();
  const Vector3 b3 = force / norm;
  const Vector3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  Vector3 b2 = b3.cross(heading);
  if (b2.norm() < 1e-9) b2 = b3.cross(Vector3::UnitX());  // force along the heading
  b2.normalize();
  const Vector3 b1 = b2.cross(b3);
  Rotation r;
  r << b1, b2, b3;
  return r;
}

AttitudeCommand attitude_thrust(const Vector3& force, const Rotation& r, const Vector3& omega,
                                double yaw_des, const Vector3& omega_des, const Matrix3& inertia,
                                const CableGains& gains, double f_max) {
  AttitudeCommand out;
  out.r_des = desired_attitude(force, yaw_des);
  const double f = force.dot(r.col(2));
  out.command.thrust = std::clamp(f, 0.0, f_max);
  out.saturated = out.command.thrust != f;

  const Matrix3 rel = r.transpose() * out.r_des;
  const Vector3 omega_ref = rel * omega_des;
  out.e_R = attitude_error(r, out.r_des);
  out.e_Omega = omega_ref - omega;
  out.command.moment = gains.k_R.cwiseProduct(out.e_R) + gains.k_Omega.cwiseProduct(out.e_Omega) +
                       omega.cross(inertia * omega) - inertia * (hat(omega) * omega_ref);
  return out;
}

RobotController::RobotController(CableGains gains, double mass, Matrix3 inertia,
                                 double cable_length, double f_max, double gravity,
                                 double filter_hz)
    : gains_(std::move(gains)), mass_(mass), inertia_(std::move(inertia)), length_(cable_length),
      f_max_(f_max), gravity_(gravity), filter_hz_(filter_hz), cable_filter_(filter_hz) {
  if (!(mass > 0.0) || !(cable_length > 0.0) || !(f_max > 0.0)) {
    throw std::invalid_argument("RobotController: mass, cable length and f_max must be positive");
  }
}

void RobotController::reset() {
  cable_filter_.reset();
  last_desired_ = DesiredCable{};
  have_r_des_ = false;
  omega_des_.setZero();
}

RobotControlOutput RobotController::compute(const RobotEstimate& est, const Vector3& mu_des,
                                            const Vector3& a_c, double yaw_des, double dt) {
  RobotControlOutput out;
  try {
    last_desired_ = cable_filter_.update(mu_des, dt);
  } catch (const DegenerateTension&) {
    out.degenerate_tension = true;
  }
  out.desired = last_desired_;

  const Vector3 q = est.cable_direction.normalized();
  out.force = cable_force(q, est.cable_rate, out.desired, mu_des, a_c, mass_, length_, gains_);

  Vector3 force = out.force.total;
  if (!(force.norm() > kEpsilon)) {
    out.degenerate_force = true;
    force = mass_ * gravity_ * Vector3::UnitZ();
  }
  const Rotation r_des = desired_attitude(force, yaw_des);
  if (have_r_des_) {
    const Vector3 raw = so3_log(Rotation(previous_r_des_.transpose() * r_des)) / dt;
    omega_des_ += lowpass_alpha(filter_hz_, dt) * (raw - omega_des_);
  }
  previous_r_des_ = r_des;
  have_r_des_ = true;

  const AttitudeCommand att = attitude_thrust(force, est.rotation, est.angular_velocity, yaw_des,
                                              omega_des_, inertia_, gains_, f_max_);
  out.command = att.command;
  out.r_des = att.r_des;
  out.saturated = att.saturated;
  return out;
}

}  // namespace cstrans
