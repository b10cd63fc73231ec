#pragma once

// Per-robot unscented Kalman filter over position, velocity, ZYX Euler
// angles, body rates, cable direction, cable rate and tension magnitude.

#include "cstrans/dynamics.hpp"
#include "cstrans/types.hpp"

namespace cstrans {

inline constexpr int kUkfStateDim = 19;
inline constexpr int kUkfNoiseDim = 16;
inline constexpr int kUkfMeasDim = 18;

using UkfState = Eigen::Matrix<double, kUkfStateDim, 1>;
using UkfCovariance = Eigen::Matrix<double, kUkfStateDim, kUkfStateDim>;
using UkfNoise = Eigen::Matrix<double, kUkfNoiseDim, 1>;
using UkfMeasurement = Eigen::Matrix<double, kUkfMeasDim, 1>;

/// Offsets into the state vector.
namespace ukf_index {
inline constexpr int position = 0;
inline constexpr int velocity = 3;
inline constexpr int euler = 6;  // yaw, pitch, roll
inline constexpr int omega = 9;
inline constexpr int q = 12;
inline constexpr int q_dot = 15;
inline constexpr int tension = 18;
}  // namespace ukf_index

/// Offsets into the process noise vector.
namespace ukf_noise_index {
inline constexpr int force = 0;
inline constexpr int tension = 3;
inline constexpr int q = 4;
inline constexpr int moment = 7;
inline constexpr int omega = 10;
inline constexpr int q_dot = 13;
}  // namespace ukf_noise_index

struct UkfBelief {
  UkfState mean = UkfState::Zero();
  UkfCovariance covariance = UkfCovariance::Identity();
};

struct UkfInput {
  double thrust = 0.0;
  Vector3 moment = Vector3::Zero();
};

/// Standard deviations; process noise is per predict step.
struct NoiseConfig {
  UkfNoise process_std;
  UkfMeasurement measurement_std;

  static NoiseConfig defaults();
  Eigen::Matrix<double, kUkfNoiseDim, kUkfNoiseDim> process_covariance() const;
  Eigen::Matrix<double, kUkfMeasDim, kUkfMeasDim> measurement_covariance() const;
  void validate() const;  // throws ConfigError
};

enum class RotationUpdate {
  Spatial,  // R exp(hat(R Omega dt)): rate rotated into the world frame, right-multiplied
  Body,     // R exp(hat(Omega dt)): exact for a body-frame rate
};

struct UkfModel {
  double mass = 0.25;
  Matrix3 inertia = Matrix3::Identity();
  double cable_length = 1.0;
  double gravity = kGravity;
  RotationUpdate rotation_update = RotationUpdate::Spatial;
};

struct UkfParams {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;
};

/// Counters of repairs and clamps; nothing is silently altered.
struct UkfEvents {
  long covariance_repairs = 0;
  long tension_clamps = 0;
  long gimbal_warnings = 0;
};

/// One step of the discrete process model with explicit noise inputs.
UkfState ukf_process(const UkfState& x, const UkfInput& u, const UkfNoise& n, double dt,
                     const UkfModel& model);

/// Unscented prediction over the augmented state; dt in (0, 0.05].
UkfBelief ukf_predict(const UkfBelief& belief, const UkfInput& u, double dt, const UkfModel& model,
                      const Eigen::Matrix<double, kUkfNoiseDim, kUkfNoiseDim>& q_cov,
                      const UkfParams& params = {}, UkfEvents* events = nullptr);

/// Linear update with H = [I_18 | 0] in Joseph form. `innovation` receives z - H x.
UkfBelief ukf_update(const UkfBelief& belief, const UkfMeasurement& z,
                     const Eigen::Matrix<double, kUkfMeasDim, kUkfMeasDim>& r_cov,
                     UkfEvents* events = nullptr, UkfMeasurement* innovation = nullptr);

UkfMeasurement measurement_vector(const Measurement& m);

struct TensionEstimate {
  double magnitude = 0.0;
  Vector3 on_quad = Vector3::Zero();     // mu q
  Vector3 on_payload = Vector3::Zero();  // -mu q
};

TensionEstimate estimated_tension(const UkfBelief& belief);

/// Belief initialised from a measurement and a tension prior.
UkfBelief initial_belief(const Measurement& z, double tension_prior, double tension_std,
                         const NoiseConfig& noise);

class RobotUkf {
 public:
  RobotUkf(UkfModel model, NoiseConfig noise, UkfBelief initial, UkfParams params = {});

  void predict(const UkfInput& u, double dt);
  void update(const Measurement& z);

  const UkfBelief& belief() const { return belief_; }
  void set_belief(const UkfBelief& b) { belief_ = b; }
  const UkfEvents& events() const { return events_; }
  const UkfMeasurement& last_innovation() const { return innovation_; }
  TensionEstimate tension() const { return estimated_tension(belief_); }
  const UkfModel& model() const { return model_; }

 private:
  UkfModel model_;
  NoiseConfig noise_;
  UkfParams params_;
  Eigen::Matrix<double, kUkfNoiseDim, kUkfNoiseDim> q_cov_;
  Eigen::Matrix<double, kUkfMeasDim, kUkfMeasDim> r_cov_;
  UkfBelief belief_;
  UkfEvents events_;
  UkfMeasurement innovation_ = UkfMeasurement::Zero();
};

}  // namespace cstrans
