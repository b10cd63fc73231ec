#pragma once

// Wrench-to-tension mapping P, minimum-norm distribution and the null-space
// machinery shared by both safety modifiers.

#include <vector>

#include "cstrans/linalg.hpp"
#include "cstrans/types.hpp"

namespace cstrans {

/// Tension vectors stacked per robot, mu in R^{3n}; mu_k is the force the
/// cable exerts on the payload (pointing from the attach point to the robot).
using TensionSet = VectorX;

inline Vector3 tension_of(const TensionSet& mu, std::size_t k) {
  return mu.segment<3>(3 * static_cast<Eigen::Index>(k));
}

struct AllocationGeometry {
  std::vector<Vector3> attach_offsets;   // rho_k, payload frame
  Rotation payload_rotation = Rotation::Identity();
  std::vector<Vector3> attach_points;    // world frame
  std::vector<double> cable_lengths;

  std::size_t team_size() const { return attach_offsets.size(); }

  static AllocationGeometry from_payload(const PayloadState& payload,
                                         const std::vector<CableParams>& cables);
};

/// 6 x 3n map [I ... I; hat(rho_k) R_L^T ...] from tensions to payload wrench.
MatrixX build_P(const AllocationGeometry& geometry);

/// mu_bar = P^+ w. Throws SingularConfiguration.
TensionSet distribute_min_norm(const MatrixX& p, const Wrench& w);

/// v = (I - P^+ P) g. Throws SingularConfiguration.
VectorX project_nullspace(const MatrixX& p, const VectorX& g);

/// Robot position implied by a tension vector: p_att + l mu/|mu|.
Vector3 kinematic_robot_position(const AllocationGeometry& geometry, std::size_t k,
                                 const Vector3& tension);

/// Cost w(v) = sum_k |p_O - (p_att,k + l_k unit(mu_bar_k + v_k))|^2.
double separation_cost(const TensionSet& mu_bar, const VectorX& v,
                       const AllocationGeometry& geometry, const Vector3& object);

/// dw/dv in closed form: -2 l_k (I - q q^T)(p_O - p_att,k) / |mu_bar_k + v_k| per robot.
/// Throws DegenerateTension when some |mu_bar_k + v_k| <= 1e-6.
VectorX separation_cost_gradient(const TensionSet& mu_bar, const VectorX& v,
                                 const AllocationGeometry& geometry, const Vector3& object);

/// Exponential-decay gain a exp(-b |p_O - x_k|).
double modifier_gain(double a, double b, const Vector3& object, const Vector3& robot_position);

struct GradientModifierParams {
  double gain = 2.0;   // a
  double decay = 2.0;  // b
};

struct GradientModifierResult {
  VectorX modifier;       // v in null(P)
  bool degenerate = false;
  double nullspace_residual = 0.0;  // |P v|
};

/// Gradient-ascent tension modifier. v persists between control steps and is
/// re-projected onto the current null space every step.
class GradientModifier {
 public:
  explicit GradientModifier(GradientModifierParams params = {}) : params_(params) {}

  /// One Q-scaled ascent step: v <- B (v + Q dw/dv). On a degenerate tension
  /// the previous v is returned and the flag set.
  GradientModifierResult step(const TensionSet& mu_bar, const AllocationGeometry& geometry,
                              const MatrixX& p, const Vector3& object,
                              const std::vector<Vector3>& robot_positions);

  void reset() { v_.resize(0); }
  const VectorX& modifier() const { return v_; }
  const GradientModifierParams& params() const { return params_; }
  void set_params(const GradientModifierParams& p) { params_ = p; }

 private:
  GradientModifierParams params_;
  VectorX v_;
};

}  // namespace cstrans
