#pragma once

#include <Eigen/Dense>

#include <vector>

#include "cstrans/so3.hpp"

namespace cstrans {

inline constexpr double kGravity = 9.81;

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Force in the world frame, moment in the payload frame.
struct Wrench {
  Vector3 force = Vector3::Zero();
  Vector3 moment = Vector3::Zero();

  Vector6 stacked() const {
    Vector6 w;
    w << force, moment;
    return w;
  }
  static Wrench from_stacked(const Vector6& w) { return {w.head<3>(), w.tail<3>()}; }
};

struct PayloadState {
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();
  Rotation rotation = Rotation::Identity();
  Vector3 angular_velocity = Vector3::Zero();  // payload frame
};

struct QuadrotorState {
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();
  Rotation rotation = Rotation::Identity();
  Vector3 angular_velocity = Vector3::Zero();  // body frame
};

struct CableParams {
  double length = 1.0;                       // rest length l_k [m]
  Vector3 attach_offset = Vector3::Zero();   // rho_k, payload frame [m]
  double stiffness = 5000.0;                 // [N/m]
  double damping = 20.0;                     // [N s/m]
};

struct BodyParams {
  double mass = 1.0;
  Matrix3 inertia = Matrix3::Identity();
  double motor_constant = 0.0;  // k_f, quadrotors only [N s^2/rad^2]
};

/// Every physical parameter of the team.
struct SystemParams {
  BodyParams payload;
  std::vector<BodyParams> quads;
  std::vector<CableParams> cables;
  double gravity = kGravity;

  std::size_t team_size() const { return quads.size(); }
};

struct WorldState {
  PayloadState payload;
  std::vector<QuadrotorState> quads;
  Wrench external;  // applied by the human
  double time = 0.0;
};

/// Thrust magnitude along body z and body-frame moment of one quadrotor.
struct RobotCommand {
  double thrust = 0.0;
  Vector3 moment = Vector3::Zero();
};

}  // namespace cstrans
