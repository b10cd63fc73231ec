#include "cstrans/ukf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cstrans {

namespace {

constexpr int kAugDim = kUkfStateDim + kUkfNoiseDim;
using AugState = Eigen::Matrix<double, kAugDim, 1>;
using AugCovariance = Eigen::Matrix<double, kAugDim, kAugDim>;

constexpr double kGimbalMargin = 1e-2;

void wrap_euler(UkfState& x) {
  for (int i = 0; i < 3; ++i) x(ukf_index::euler + i) = wrap_angle(x(ukf_index::euler + i));
}

UkfState difference(const UkfState& a, const UkfState& b) {
  UkfState d = a - b;
  wrap_euler(d);
  return d;
}

void normalize_belief(UkfBelief& b, UkfEvents* events) {
  wrap_euler(b.mean);
  const double qn = b.mean.segment<3>(ukf_index::q).norm();
  if (qn > 1e-9) b.mean.segment<3>(ukf_index::q) /= qn;
  if (b.mean(ukf_index::tension) < 0.0) {
    b.mean(ukf_index::tension) = 0.0;
    if (events != nullptr) ++events->tension_clamps;
  }
  if (events != nullptr &&
      std::abs(b.mean(ukf_index::euler + 1)) > std::numbers::pi / 2 - kGimbalMargin) {
    ++events->gimbal_warnings;
  }
  b.covariance = 0.5 * (b.covariance + b.covariance.transpose()).eval();
}

}  // namespace

NoiseConfig NoiseConfig::defaults() {
  NoiseConfig n;
  n.process_std << Vector3::Constant(0.05), 0.004, Vector3::Constant(1e-4),
      Vector3::Constant(2e-3), Vector3::Constant(1e-3), Vector3::Constant(2e-3);
  const double deg = std::numbers::pi / 180.0;
  n.measurement_std << Vector3::Constant(1e-3), Vector3::Constant(0.01), Vector3::Constant(0.2 * deg),
      Vector3::Constant(0.01), Vector3::Constant(2e-3), Vector3::Constant(0.015);
  return n;
}

Eigen::Matrix<double, kUkfNoiseDim, kUkfNoiseDim> NoiseConfig::process_covariance() const {
  return process_std.cwiseAbs2().asDiagonal();
}

Eigen::Matrix<double, kUkfMeasDim, kUkfMeasDim> NoiseConfig::measurement_covariance() const {
  return measurement_std.cwiseAbs2().asDiagonal();
}

void NoiseConfig::validate() const {
  if ((process_std.array() < 0.0).any() || !process_std.allFinite()) {
    throw ConfigError("ukf: process noise standard deviations must be finite and >= 0");
  }
  if ((measurement_std.array() <= 0.0).any() || !measurement_std.allFinite()) {
    throw ConfigError("ukf: measurement noise standard deviations must be finite and > 0");
  }
}

UkfState ukf_process(const UkfState& x, const UkfInput& u, const UkfNoise& n, double dt,
                     const UkfModel& model) {
  namespace si = ukf_index;
  namespace ni = ukf_noise_index;
  const Vector3 v = x.segment<3>(si::velocity);
  const Rotation r = euler_zyx_to_rot(EulerZYX::from_vector(x.segment<3>(si::euler)));
  const Vector3 omega = x.segment<3>(si::omega);
  const Vector3 q = x.segment<3>(si::q);
  const Vector3 q_dot = x.segment<3>(si::q_dot);
  const double mu = x(si::tension);
  const Vector3 e3 = Vector3::UnitZ();

  const Vector3 thrust = r * (u.thrust * e3 + n.segment<3>(ni::force));
  const Vector3 q_noisy = q + n.segment<3>(ni::q);
  const Vector3 acc = (thrust + q_noisy * (mu + n(ni::tension))) / model.mass - model.gravity * e3;

  const Vector3 omega_noisy = omega + n.segment<3>(ni::omega);
  const Vector3 omega_dot =
      model.inertia.ldlt().solve(u.moment + n.segment<3>(ni::moment) -
                                 omega_noisy.cross(model.inertia * omega_noisy));

  // Attach-point acceleration is not part of the robot state; taken as zero.
  const Matrix3 qh = hat(q);
  const Vector3 q_ddot = qh * qh * (thrust - model.mass * model.gravity * e3) /
                             (model.mass * model.cable_length) -
                         q_dot.squaredNorm() * q;

  const Vector3 step = model.rotation_update == RotationUpdate::Spatial ? Vector3(r * omega * dt)
                                                                        : Vector3(omega * dt);
  const Rotation r_next = r * so3_exp(step);

  UkfState out;
  out.segment<3>(si::position) = x.segment<3>(si::position) + v * dt + 0.5 * acc * dt * dt;
  out.segment<3>(si::velocity) = v + acc * dt;
  out.segment<3>(si::euler) = rot_to_euler_zyx(r_next).vector();
  out.segment<3>(si::omega) = omega + omega_dot * dt;
  out.segment<3>(si::q) = q + q_dot * dt + 0.5 * q_ddot * dt * dt + n.segment<3>(ni::q);
  out.segment<3>(si::q_dot) = q_dot + q_ddot * dt + n.segment<3>(ni::q_dot);
  out(si::tension) = mu + n(ni::tension);
  return out;
}

UkfBelief ukf_predict(const UkfBelief& belief, const UkfInput& u, double dt, const UkfModel& model,
                      const Eigen::Matrix<double, kUkfNoiseDim, kUkfNoiseDim>& q_cov,
                      const UkfParams& params, UkfEvents* events) {
  if (!(dt > 0.0) || dt > 0.05) throw std::invalid_argument("ukf_predict: dt must lie in (0, 0.05]");
  constexpr double L = kAugDim;
  const double lambda = params.alpha * params.alpha * (L + params.kappa) - L;
  const double scale = L + lambda;

  AugCovariance pa = AugCovariance::Zero();
  pa.topLeftCorner<kUkfStateDim, kUkfStateDim>() = belief.covariance;
  pa.bottomRightCorner<kUkfNoiseDim, kUkfNoiseDim>() = q_cov;

  Eigen::LLT<AugCovariance> llt(scale * pa);
  double jitter = 1e-12 * std::max(1.0, pa.trace());
  while (llt.info() != Eigen::Success) {
    if (events != nullptr) ++events->covariance_repairs;
    pa.diagonal().array() += jitter;
    llt.compute(scale * pa);
    jitter *= 10.0;
    if (jitter > 1e3) throw NumericalBlowup("ukf_predict: covariance repair failed");
  }
  const AugCovariance sq = llt.matrixL();

  const double w0m = lambda / scale;
  const double w0c = w0m + (1.0 - params.alpha * params.alpha + params.beta);
  const double wi = 0.5 / scale;

  constexpr int count = 2 * kAugDim + 1;
  std::array<UkfState, count> chi;
  AugState center = AugState::Zero();
  center.head<kUkfStateDim>() = belief.mean;
  auto propagate = [&](const AugState& a) {
    UkfState x = a.head<kUkfStateDim>();
    wrap_euler(x);
    return ukf_process(x, u, a.tail<kUkfNoiseDim>(), dt, model);
  };
  chi[0] = propagate(center);
  for (int i = 0; i < kAugDim; ++i) {
    chi[1 + i] = propagate(center + sq.col(i));
    chi[1 + kAugDim + i] = propagate(center - sq.col(i));
  }

  // Mean relative to the centre point so Euler wrap-around is harmless.
  UkfState offset = UkfState::Zero();
  for (int i = 1; i < count; ++i) offset += wi * difference(chi[i], chi[0]);
  UkfBelief out;
  out.mean = chi[0] + offset;
  wrap_euler(out.mean);

  out.covariance.setZero();
  for (int i = 0; i < count; ++i) {
    const UkfState d = difference(chi[i], out.mean);
    out.covariance += (i == 0 ? w0c : wi) * d * d.transpose();
  }
  normalize_belief(out, events);
  return out;
}

UkfBelief ukf_update(const UkfBelief& belief, const UkfMeasurement& z,
                     const Eigen::Matrix<double, kUkfMeasDim, kUkfMeasDim>& r_cov,
                     UkfEvents* events, UkfMeasurement* innovation) {
  if (!z.allFinite()) throw std::invalid_argument("ukf_update: measurement is not finite");
  Eigen::Matrix<double, kUkfMeasDim, kUkfStateDim> h = Eigen::Matrix<double, kUkfMeasDim, kUkfStateDim>::Zero();
  h.leftCols<kUkfMeasDim>().setIdentity();

  UkfMeasurement y = z - h * belief.mean;
  for (int i = 0; i < 3; ++i) y(ukf_index::euler + i) = wrap_angle(y(ukf_index::euler + i));
  if (innovation != nullptr) *innovation = y;

  const Eigen::Matrix<double, kUkfMeasDim, kUkfMeasDim> s = h * belief.covariance * h.transpose() + r_cov;
  const Eigen::Matrix<double, kUkfStateDim, kUkfMeasDim> pht = belief.covariance * h.transpose();
  const Eigen::Matrix<double, kUkfStateDim, kUkfMeasDim> k = s.ldlt().solve(pht.transpose()).transpose();

  UkfBelief out;
  out.mean = belief.mean + k * y;
  const UkfCovariance a = UkfCovariance::Identity() - k * h;
  out.covariance = a * belief.covariance * a.transpose() + k * r_cov * k.transpose();
  normalize_belief(out, events);
  return out;
}

UkfMeasurement measurement_vector(const Measurement& m) { return m.vector(); }

TensionEstimate estimated_tension(const UkfBelief& belief) {
  TensionEstimate t;
  t.magnitude = belief.mean(ukf_index::tension);
  const Vector3 q = belief.mean.segment<3>(ukf_index::q);
  t.on_quad = t.magnitude * q;
  t.on_payload = -t.on_quad;
  return t;
}

UkfBelief initial_belief(const Measurement& z, double tension_prior, double tension_std,
                         const NoiseConfig& noise) {
  UkfBelief b;
  b.mean.head<kUkfMeasDim>() = z.vector();
  b.mean(ukf_index::tension) = std::max(0.0, tension_prior);
  b.covariance.setZero();
  b.covariance.diagonal().head<kUkfMeasDim>() = noise.measurement_std.cwiseAbs2();
  b.covariance(ukf_index::tension, ukf_index::tension) = tension_std * tension_std;
  normalize_belief(b, nullptr);
  return b;
}

RobotUkf::RobotUkf(UkfModel model, NoiseConfig noise, UkfBelief initial, UkfParams params)
    : model_(std::move(model)), noise_(std::move(noise)), params_(params),
      q_cov_(noise_.process_covariance()), r_cov_(noise_.measurement_covariance()),
      belief_(std::move(initial)) {
  noise_.validate();
}

void RobotUkf::predict(const UkfInput& u, double dt) {
  belief_ = ukf_predict(belief_, u, dt, model_, q_cov_, params_, &events_);
}

void RobotUkf::update(const Measurement& z) {
  belief_ = ukf_update(belief_, z.vector(), r_cov_, &events_, &innovation_);
}

}  // namespace cstrans
