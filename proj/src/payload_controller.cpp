#include "cstrans/payload_controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace cstrans {

PayloadController::PayloadController(PayloadGains gains, double payload_mass,
                                     Matrix3 payload_inertia, double gravity)
    : gains_(std::move(gains)), mass_(payload_mass), inertia_(std::move(payload_inertia)),
      gravity_(gravity) {
  if (!(payload_mass > 0.0)) throw std::invalid_argument("payload mass must be positive");
  if (!(gains_.integral_clamp > 0.0)) throw std::invalid_argument("integral clamp must be positive");
}

PayloadControlOutput PayloadController::desired_wrench(const PayloadState& state,
                                                       const PayloadReference& ref, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("desired_wrench: dt must be positive");
  PayloadControlOutput out;
  const Vector3 e_x = ref.position - state.position;
  const Vector3 e_v = ref.velocity - state.velocity;

  integral_ += e_x * dt;
  for (int i = 0; i < 3; ++i) {
    if (gains_.ki(i) <= 0.0) continue;
    const double bound = gains_.integral_clamp / (mass_ * gains_.ki(i));
    integral_(i) = std::clamp(integral_(i), -bound, bound);
  }

  const Vector3 a_c = gains_.kp.cwiseProduct(e_x) + gains_.kd.cwiseProduct(e_v) +
                      gains_.ki.cwiseProduct(integral_) + ref.acceleration +
                      gravity_ * Vector3::UnitZ();
  out.commanded_acceleration = a_c;
  out.wrench.force = mass_ * a_c;

  const Rotation& r = state.rotation;
  const Matrix3 rel = r.transpose() * ref.rotation;
  const Vector3 e_r = attitude_error(r, ref.rotation);
  const Vector3 omega_ref = rel * ref.angular_velocity;
  const Vector3 e_w = omega_ref - state.angular_velocity;
  out.wrench.moment = gains_.k_rot.cwiseProduct(e_r) + gains_.k_omega.cwiseProduct(e_w) +
                      inertia_ * (rel * ref.angular_acceleration) +
                      omega_ref.cross(inertia_ * omega_ref);
  out.position_error = e_x;
  out.attitude_error = e_r;
  return out;
}

}  // namespace cstrans
