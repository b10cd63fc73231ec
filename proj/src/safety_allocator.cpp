#include "cstrans/safety_allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cstrans {

namespace {

constexpr double kTensionEpsilon = 1e-6;

struct CableMap {
  Vector3 position;
  Matrix3 jacobian;  // d x_k / d s_k
};

CableMap cable_map(const AllocationGeometry& geometry, std::size_t k, const Vector3& s) {
  const double norm = std::max(s.norm(), kTensionEpsilon);
  const Vector3 u = s.norm() > kTensionEpsilon ? Vector3(s / norm) : Vector3::UnitZ();
  const double l = geometry.cable_lengths[k];
  return {geometry.attach_points[k] + l * u, l * (Matrix3::Identity() - u * u.transpose()) / norm};
}

}  // namespace

const char* to_string(SafetyMode mode) {
  switch (mode) {
    case SafetyMode::Off: return "off";
    case SafetyMode::Gradient: return "gradient";
    case SafetyMode::Optimization: return "optimization";
  }
  return "unknown";
}

SafetyMode safety_mode_from_string(const std::string& name) {
  if (name == "off") return SafetyMode::Off;
  if (name == "gradient") return SafetyMode::Gradient;
  if (name == "optimization") return SafetyMode::Optimization;
  throw ConfigError("unknown safety mode '" + name + "'");
}

void SafetyParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("safety: a and b must be positive");
  if (!(human_clearance > 0.0) || !(robot_clearance > 0.0)) {
    throw ConfigError("safety: clearances must be positive");
  }
  if (!(max_tension > 0.0)) throw ConfigError("safety: max_tension must be positive");
  if (solver.max_outer_iterations <= 0 || solver.max_inner_iterations <= 0) {
    throw ConfigError("safety: solver iteration limits must be positive");
  }
  if (!(solver.feasibility_tolerance > 0.0) || !(solver.penalty_growth > 1.0)) {
    throw ConfigError("safety: invalid solver tolerance or penalty growth");
  }
}

std::vector<Vector3> kinematic_positions(const AllocationGeometry& geometry, const TensionSet& mu) {
  std::vector<Vector3> out;
  out.reserve(geometry.team_size());
  for (std::size_t k = 0; k < geometry.team_size(); ++k) {
    out.push_back(cable_map(geometry, k, tension_of(mu, k)).position);
  }
  return out;
}

ClearanceSlacks clearance_slacks(const std::vector<Vector3>& positions, const Vector3& object,
                                 double human_clearance, double robot_clearance) {
  ClearanceSlacks s;
  s.human = std::numeric_limits<double>::infinity();
  s.robot = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    s.human = std::min(s.human, (object - positions[i]).norm() - human_clearance);
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      s.robot = std::min(s.robot, (positions[i] - positions[j]).norm() - robot_clearance);
    }
  }
  return s;
}

ConstrainedProblem modifier_problem(const TensionSet& mu_bar, const MatrixX& g,
                                    const AllocationGeometry& geometry, const Vector3& object,
                                    const SafetyParams& params) {
  const std::size_t n = geometry.team_size();
  const auto ni = static_cast<Eigen::Index>(n);
  ConstrainedProblem prob;
  prob.dimension = g.cols();
  prob.num_constraints = ni + ni * (ni - 1) / 2;

  prob.objective = [mu_bar, g](const VectorX& c, VectorX* grad) {
    const VectorX mu = mu_bar + g * c;
    if (grad != nullptr) *grad = 2.0 * g.transpose() * mu;
    return mu.squaredNorm();
  };

  const double rh2 = params.human_clearance * params.human_clearance;
  const double rr2 = params.robot_clearance * params.robot_clearance;
  prob.constraints = [mu_bar, g, geometry, object, n, rh2, rr2](const VectorX& c, VectorX& out,
                                                                  MatrixX* jac) {
    const VectorX mu = mu_bar + g * c;
    std::vector<Vector3> x(n);
    std::vector<MatrixX> dx(n);  // 3 x dim
    for (std::size_t k = 0; k < n; ++k) {
      const CableMap m = cable_map(geometry, k, tension_of(mu, k));
      x[k] = m.position;
      if (jac != nullptr) dx[k] = m.jacobian * g.middleRows<3>(3 * static_cast<Eigen::Index>(k));
    }
    out.resize(static_cast<Eigen::Index>(n + n * (n - 1) / 2));
    if (jac != nullptr) jac->resize(out.size(), g.cols());
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < n; ++k, ++row) {
      const Vector3 d = object - x[k];
      out(row) = d.squaredNorm() - rh2;
      if (jac != nullptr) jac->row(row) = -2.0 * d.transpose() * dx[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++row) {
        const Vector3 d = x[i] - x[j];
        out(row) = d.squaredNorm() - rr2;
        if (jac != nullptr) jac->row(row) = 2.0 * d.transpose() * (dx[i] - dx[j]);
      }
    }
  };
  return prob;
}

OptimizeResult optimize_modifier(const TensionSet& mu_bar, const MatrixX& g,
                                 const AllocationGeometry& geometry, const Vector3& object,
                                 const SafetyParams& params, const VectorX& c0) {
  const ConstrainedProblem prob = modifier_problem(mu_bar, g, geometry, object, params);
  OptimizeResult out;
  out.solve = solve_augmented_lagrangian(prob, c0, params.solver);
  out.c = out.solve.x;
  out.tensions = mu_bar + g * out.c;
  out.slacks = clearance_slacks(kinematic_positions(geometry, out.tensions), object,
                                params.human_clearance, params.robot_clearance);
  return out;
}

SafetyAllocator::SafetyAllocator(SafetyParams params)
    : params_(params), gradient_(GradientModifierParams{params.a, params.b}) {
  params_.validate();
}

void SafetyAllocator::reset() {
  gradient_.reset();
  last_modifier_.resize(0);
  last_feasible_modifier_.resize(0);
}

void SafetyAllocator::set_params(const SafetyParams& params) {
  params.validate();
  const bool mode_changed = params.mode != params_.mode;
  params_ = params;
  gradient_.set_params({params.a, params.b});
  if (mode_changed) reset();
}

void SafetyAllocator::set_mode(SafetyMode mode) {
  SafetyParams p = params_;
  p.mode = mode;
  set_params(p);
}

AllocationResult SafetyAllocator::allocate(const Wrench& wrench, const AllocationGeometry& geometry,
                                           const Vector3& object,
                                           const std::vector<Vector3>& robot_positions) {
  const MatrixX p = build_P(geometry);
  RowSpaceSolver<double> solver(p);
  AllocationResult res;
  res.mu_bar = solver.min_norm(wrench.stacked());
  AllocationDiagnostics& diag = res.diagnostics;

  switch (params_.mode) {
    case SafetyMode::Off:
      res.mu_des = res.mu_bar;
      break;
    case SafetyMode::Gradient: {
      const GradientModifierResult gr = gradient_.step(res.mu_bar, geometry, p, object, robot_positions);
      diag.degenerate = gr.degenerate;
      res.mu_des = res.mu_bar + gr.modifier;
      break;
    }
    case SafetyMode::Optimization: {
      const MatrixX g = nullspace_basis(p);
      const Eigen::Index dim3 = res.mu_bar.size();
      // The SVD basis may rotate between steps, so warm-start through v.
      const VectorX c0 = last_modifier_.size() == dim3 ? VectorX(g.transpose() * last_modifier_)
                                                       : VectorX::Zero(g.cols());
      const OptimizeResult opt = optimize_modifier(res.mu_bar, g, geometry, object, params_, c0);
      diag.solver_status = opt.solve.status;
      diag.solver_iterations = opt.solve.inner_iterations;
      diag.stationarity = opt.solve.stationarity;
      VectorX v = g * opt.c;
      if (opt.solve.status == SolveStatus::Infeasible) {
        diag.infeasible = true;
        v = last_feasible_modifier_.size() == dim3 ? solver.project_null(last_feasible_modifier_)
                                                   : VectorX::Zero(dim3);
      } else {
        last_feasible_modifier_ = v;
      }
      last_modifier_ = v;
      res.mu_des = res.mu_bar + v;
      break;
    }
  }

  diag.objective = res.mu_des.squaredNorm();
  diag.nullspace_residual = (p * (res.mu_des - res.mu_bar)).norm();
  diag.wrench_residual = (p * res.mu_des - wrench.stacked()).norm();
  diag.slacks = clearance_slacks(kinematic_positions(geometry, res.mu_des), object,
                                 params_.human_clearance, params_.robot_clearance);
  for (std::size_t k = 0; k < geometry.team_size(); ++k) {
    if (tension_of(res.mu_des, k).norm() > params_.max_tension) diag.tension_bound_exceeded = true;
  }
  return res;
}

}  // namespace cstrans
