#include "cstrans/wrench_admittance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cstrans {

Wrench estimate_payload_wrench(const TensionSet& mu, const MatrixX& p, double payload_mass,
                               double gravity) {
  if (p.cols() != mu.size() || p.rows() != 6) {
    throw std::invalid_argument("estimate_payload_wrench: size mismatch");
  }
  Vector6 w = -(p * mu);
  w(2) += payload_mass * gravity;
  return Wrench::from_stacked(w);
}

WrenchEstimator::WrenchEstimator(double payload_mass, double max_age, double gravity)
    : mass_(payload_mass), max_age_(max_age), gravity_(gravity) {}

Wrench WrenchEstimator::estimate_strict(const TensionSet& mu, const std::vector<double>& stamps,
                                        double now, const MatrixX& p) const {
  for (double s : stamps) {
    if (now - s > max_age_) throw StaleTension();
  }
  return estimate_payload_wrench(mu, p, mass_, gravity_);
}

WrenchEstimator::Result WrenchEstimator::estimate(const TensionSet& mu,
                                                  const std::vector<double>& stamps, double now,
                                                  const MatrixX& p) {
  try {
    last_ = estimate_strict(mu, stamps, now, p);
    return {last_, false};
  } catch (const StaleTension&) {
    return {last_, true};
  }
}

void AdmittanceGains::validate() const {
  if (!mass.allFinite() || !damping.allFinite() || !stiffness.allFinite()) {
    throw ConfigError("admittance: gains must be finite");
  }
  if ((mass.array() <= 0.0).any()) throw ConfigError("admittance: virtual mass must be positive");
  if ((damping.array() < 0.0).any() || (stiffness.array() < 0.0).any()) {
    throw ConfigError("admittance: damping and stiffness must be non-negative");
  }
}

AdmittanceOutput admittance_step(const AdmittanceState& s, const Vector6& wrench,
                                 const AdmittanceGains& gains, const AdmittanceReference& ref,
                                 double dt) {
  if (!(dt > 0.0) || dt > 0.05) throw std::invalid_argument("admittance_step: dt must lie in (0, 0.05]");
  const Vector6 inv_m = gains.mass.cwiseInverse();
  auto accel = [&](const Vector6& e, const Vector6& ed) -> Vector6 {
    return inv_m.cwiseProduct(wrench - gains.damping.cwiseProduct(ed) - gains.stiffness.cwiseProduct(e));
  };

  const Vector6 k1e = s.e_dot;
  const Vector6 k1v = accel(s.e, s.e_dot);
  const Vector6 k2e = s.e_dot + 0.5 * dt * k1v;
  const Vector6 k2v = accel(s.e + 0.5 * dt * k1e, k2e);
  const Vector6 k3e = s.e_dot + 0.5 * dt * k2v;
  const Vector6 k3v = accel(s.e + 0.5 * dt * k2e, k3e);
  const Vector6 k4e = s.e_dot + dt * k3v;
  const Vector6 k4v = accel(s.e + dt * k3e, k4e);

  AdmittanceOutput out;
  out.next.e = s.e + dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
  out.next.e_dot = s.e_dot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  for (int i = 3; i < 6; ++i) out.next.e(i) = wrap_angle(out.next.e(i));

  out.pose = ref.pose + out.next.e;
  for (int i = 3; i < 6; ++i) out.pose(i) = wrap_angle(out.pose(i));
  out.velocity = ref.velocity + out.next.e_dot;
  out.acceleration = ref.acceleration + accel(out.next.e, out.next.e_dot);
  return out;
}

PayloadReference to_payload_reference(const AdmittanceOutput& out) {
  PayloadReference ref;
  ref.position = out.pose.head<3>();
  ref.velocity = out.velocity.head<3>();
  ref.acceleration = out.acceleration.head<3>();
  const EulerZYX e{out.pose(5), out.pose(4), out.pose(3)};
  const EulerZYX rate{out.velocity(5), out.velocity(4), out.velocity(3)};
  ref.rotation = euler_zyx_to_rot(e);
  ref.angular_velocity = euler_zyx_rates_to_body(e, rate);
  // Not used downstream beyond the feedforward; Euler accelerations are dropped.
  ref.angular_acceleration.setZero();
  return ref;
}

AxisSolution closed_form_axis(double m, double d, double k, double f, double e0, double e_dot0,
                              double t) {
  if (!(m > 0.0)) throw std::invalid_argument("closed_form_axis: mass must be positive");
  if (k == 0.0) {
    if (d == 0.0) return {e0 + e_dot0 * t + 0.5 * f / m * t * t, e_dot0 + f / m * t};
    const double a = d / m;
    const double v_inf = f / d;
    const double decay = std::exp(-a * t);
    const double v = v_inf + (e_dot0 - v_inf) * decay;
    const double x = e0 + v_inf * t + (e_dot0 - v_inf) * (1.0 - decay) / a;
    return {x, v};
  }
  const double x_inf = f / k;
  const double y0 = e0 - x_inf;
  const double disc = d * d - 4.0 * m * k;
  const double tol = 1e-12 * std::max(d * d, 4.0 * m * k);
  if (disc > tol) {
    const double sq = std::sqrt(disc);
    const double r1 = (-d + sq) / (2.0 * m);
    const double r2 = (-d - sq) / (2.0 * m);
    const double c1 = (e_dot0 - r2 * y0) / (r1 - r2);
    const double c2 = y0 - c1;
    return {x_inf + c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t),
            c1 * r1 * std::exp(r1 * t) + c2 * r2 * std::exp(r2 * t)};
  }
  if (disc < -tol) {
    const double a = -d / (2.0 * m);
    const double w = std::sqrt(-disc) / (2.0 * m);
    const double c1 = y0;
    const double c2 = (e_dot0 - a * y0) / w;
    const double ea = std::exp(a * t);
    const double cs = std::cos(w * t), sn = std::sin(w * t);
    return {x_inf + ea * (c1 * cs + c2 * sn),
            ea * (a * (c1 * cs + c2 * sn) + w * (-c1 * sn + c2 * cs))};
  }
  const double r = -d / (2.0 * m);
  const double c1 = y0;
  const double c2 = e_dot0 - r * y0;
  const double er = std::exp(r * t);
  return {x_inf + (c1 + c2 * t) * er, (c2 + r * (c1 + c2 * t)) * er};
}

double dominant_decay_rate(double m, double d, double k) {
  const double disc = d * d - 4.0 * m * k;
  if (disc >= 0.0) return (d - std::sqrt(disc)) / (2.0 * m);
  return d / (2.0 * m);
}

Vector6 WrenchFilter::filter(const Vector6& w, double dt) {
  if (!enabled()) return w;
  if (!initialized_) {
    state_ = w;
    initialized_ = true;
    return state_;
  }
  const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff_hz_);
  state_ += dt / (dt + tau) * (w - state_);
  return state_;
}

}  // namespace cstrans
