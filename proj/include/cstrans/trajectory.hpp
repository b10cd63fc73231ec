#pragma once

// Reference trajectories, scripted wrenches and the human path.

#include <optional>
#include <vector>

#include "cstrans/config.hpp"

namespace cstrans {

class ReferenceTrajectory {
 public:
  explicit ReferenceTrajectory(TrajectorySpec spec);

  /// Pose (x, y, z, roll, pitch, yaw) and derivatives at time t; clamps
  /// outside the defined interval.
  AdmittanceReference sample(double t) const;

 private:
  TrajectorySpec spec_;
};

/// Evaluates sum c_i t^i and its first two derivatives.
struct PolySample {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
PolySample eval_polynomial(const std::vector<double>& coeffs, double t);

/// Sum of all script events active at t (start <= t < start + duration).
Wrench scripted_wrench(const std::vector<WrenchEvent>& script, double t);

/// Piecewise-linear human position; nullopt when the path is empty.
std::optional<Vector3> human_position(const std::vector<HumanPathPoint>& path, double t);

}  // namespace cstrans
