#pragma once

// Augmented Lagrangian (Powell-Hestenes-Rockafellar) method for
//   min f(x)  s.t.  g_i(x) >= 0,
// with a BFGS inner minimizer and Armijo backtracking.

#include <functional>

#include "cstrans/linalg.hpp"

namespace cstrans {

struct ConstrainedProblem {
  Eigen::Index dimension = 0;
  Eigen::Index num_constraints = 0;
  /// Returns f(x); fills the gradient when `grad` is non-null.
  std::function<double(const VectorX& x, VectorX* grad)> objective;
  /// Fills g(x) (size num_constraints) and, when non-null, its Jacobian.
  std::function<void(const VectorX& x, VectorX& g, MatrixX* jacobian)> constraints;
};

struct SolverSettings {
  int max_outer_iterations = 40;
  int max_inner_iterations = 200;
  double feasibility_tolerance = 1e-8;   // on max(0, -g_i)
  double stationarity_tolerance = 1e-6;  // on |grad f - J^T lambda|_inf
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e10;
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

const char* to_string(SolveStatus status);

struct SolveResult {
  VectorX x;
  VectorX multipliers;
  double objective = 0.0;
  double max_violation = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
};

SolveResult solve_augmented_lagrangian(const ConstrainedProblem& problem, const VectorX& x0,
                                       const SolverSettings& settings = {});

/// Unconstrained BFGS used by the inner loop; exposed for testing.
struct BfgsResult {
  VectorX x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};
BfgsResult minimize_bfgs(const std::function<double(const VectorX&, VectorX*)>& fn,
                         const VectorX& x0, double gradient_tolerance, int max_iterations);

}  // namespace cstrans
