#include "cstrans/allocation.hpp"

#include <cmath>

#include "cstrans/dynamics.hpp"

namespace cstrans {

namespace {
constexpr double kTensionEpsilon = 1e-6;
}

AllocationGeometry AllocationGeometry::from_payload(const PayloadState& payload,
                                                    const std::vector<CableParams>& cables) {
  AllocationGeometry g;
  g.payload_rotation = payload.rotation;
  for (const auto& c : cables) {
    g.attach_offsets.push_back(c.attach_offset);
    g.attach_points.push_back(attach_position(payload, c));
    g.cable_lengths.push_back(c.length);
  }
  return g;
}

MatrixX build_P(const AllocationGeometry& geometry) {
  const auto n = static_cast<Eigen::Index>(geometry.team_size());
  MatrixX p(6, 3 * n);
  const Matrix3 rt = geometry.payload_rotation.transpose();
  for (Eigen::Index k = 0; k < n; ++k) {
    p.block<3, 3>(0, 3 * k).setIdentity();
    p.block<3, 3>(3, 3 * k) = hat(geometry.attach_offsets[static_cast<std::size_t>(k)]) * rt;
  }
  return p;
}

TensionSet distribute_min_norm(const MatrixX& p, const Wrench& w) {
  RowSpaceSolver<double> solver(p);
  return solver.min_norm(w.stacked());
}

VectorX project_nullspace(const MatrixX& p, const VectorX& g) {
  RowSpaceSolver<double> solver(p);
  return solver.project_null(g);
}

Vector3 kinematic_robot_position(const AllocationGeometry& geometry, std::size_t k,
                                 const Vector3& tension) {
  return geometry.attach_points[k] + geometry.cable_lengths[k] * tension.normalized();
}

double separation_cost(const TensionSet& mu_bar, const VectorX& v,
                       const AllocationGeometry& geometry, const Vector3& object) {
  double w = 0.0;
  for (std::size_t k = 0; k < geometry.team_size(); ++k) {
    const Vector3 s = tension_of(mu_bar, k) + tension_of(v, k);
    w += (object - kinematic_robot_position(geometry, k, s)).squaredNorm();
  }
  return w;
}

VectorX separation_cost_gradient(const TensionSet& mu_bar, const VectorX& v,
                                 const AllocationGeometry& geometry, const Vector3& object) {
  VectorX grad(mu_bar.size());
  for (std::size_t k = 0; k < geometry.team_size(); ++k) {
    const Vector3 s = tension_of(mu_bar, k) + tension_of(v, k);
    const double norm = s.norm();
    if (!(norm > kTensionEpsilon)) throw DegenerateTension();
    const Vector3 q = s / norm;
    const Vector3 rel = object - geometry.attach_points[k];
    grad.segment<3>(3 * static_cast<Eigen::Index>(k)) =
        -2.0 * geometry.cable_lengths[k] * (rel - q * q.dot(rel)) / norm;
  }
  return grad;
}

double modifier_gain(double a, double b, const Vector3& object, const Vector3& robot_position) {
  return a * std::exp(-b * (object - robot_position).norm());
}

GradientModifierResult GradientModifier::step(const TensionSet& mu_bar,
                                              const AllocationGeometry& geometry,
                                              const MatrixX& p, const Vector3& object,
                                              const std::vector<Vector3>& robot_positions) {
  if (v_.size() != mu_bar.size()) v_ = VectorX::Zero(mu_bar.size());
  RowSpaceSolver<double> solver(p);
  GradientModifierResult out;

  VectorX grad;
  try {
    grad = separation_cost_gradient(mu_bar, v_, geometry, object);
  } catch (const DegenerateTension&) {
    out.modifier = v_;
    out.degenerate = true;
    out.nullspace_residual = (p * v_).norm();
    return out;
  }
  for (std::size_t k = 0; k < geometry.team_size(); ++k) {
    grad.segment<3>(3 * static_cast<Eigen::Index>(k)) *=
        modifier_gain(params_.gain, params_.decay, object, robot_positions[k]);
  }
  v_ = solver.project_null(v_ + grad);
  out.modifier = v_;
  out.nullspace_residual = (p * v_).norm();
  return out;
}

}  // namespace cstrans
