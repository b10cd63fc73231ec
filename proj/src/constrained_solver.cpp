#include "cstrans/constrained_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cstrans {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

BfgsResult minimize_bfgs(const std::function<double(const VectorX&, VectorX*)>& fn,
                         const VectorX& x0, double gradient_tolerance, int max_iterations) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = x0;
  VectorX grad(n);
  res.value = fn(res.x, &grad);
  MatrixX h_inv = MatrixX::Identity(n, n);
  bool scaled = false;

  VectorX trial_grad(n);
  for (int it = 0; it < max_iterations; ++it) {
    res.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    if (res.gradient_norm <= gradient_tolerance) break;
    res.iterations = it + 1;

    VectorX dir = -h_inv * grad;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -grad;
      slope = -grad.squaredNorm();
    }

    double step = 1.0;
    double trial_value = 0.0;
    VectorX trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = res.x + step * dir;
      trial_value = fn(trial, &trial_grad);
      if (std::isfinite(trial_value) && trial_value <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const VectorX s = trial - res.x;
    const VectorX y = trial_grad - grad;
    const double sy = s.dot(y);
    res.x = trial;
    res.value = trial_value;
    grad = trial_grad;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const VectorX hy = h_inv * y;
      h_inv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  res.gradient_norm = grad.lpNorm<Eigen::Infinity>();
  return res;
}

namespace {

double max_violation(const VectorX& g) {
  return g.size() == 0 ? 0.0 : std::max(0.0, -g.minCoeff());
}

}  // namespace

SolveResult solve_augmented_lagrangian(const ConstrainedProblem& problem, const VectorX& x0,
                                       const SolverSettings& settings) {
  const Eigen::Index m = problem.num_constraints;
  SolveResult res;
  res.x = x0;
  res.multipliers = VectorX::Zero(m);
  double penalty = settings.initial_penalty;

  VectorX g(m);
  MatrixX jac(m, problem.dimension);
  VectorX fgrad(problem.dimension);

  auto merit = [&](const VectorX& x, VectorX* grad) {
    VectorX gl(m);
    MatrixX jl;
    double value = problem.objective(x, grad);
    problem.constraints(x, gl, grad != nullptr ? &jl : nullptr);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lam = res.multipliers(i);
      const double shifted = lam - penalty * gl(i);
      if (shifted > 0.0) {
        value += -lam * gl(i) + 0.5 * penalty * gl(i) * gl(i);
        if (grad != nullptr) *grad -= shifted * jl.row(i).transpose();
      } else {
        value += -0.5 * lam * lam / penalty;
      }
    }
    return value;
  };

  auto measure = [&](const VectorX& x) {
    res.objective = problem.objective(x, &fgrad);
    problem.constraints(x, g, &jac);
    res.max_violation = max_violation(g);
    res.stationarity = m == 0 ? fgrad.lpNorm<Eigen::Infinity>()
                              : (fgrad - jac.transpose() * res.multipliers).lpNorm<Eigen::Infinity>();
    res.complementarity = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      res.complementarity = std::max(res.complementarity, std::abs(res.multipliers(i) * g(i)));
    }
  };

  double prev_violation = std::numeric_limits<double>::infinity();
  double inner_tol = 1e-3;
  for (int outer = 0; outer < settings.max_outer_iterations; ++outer) {
    res.outer_iterations = outer + 1;
    const BfgsResult inner = minimize_bfgs(merit, res.x, inner_tol, settings.max_inner_iterations);
    res.inner_iterations += inner.iterations;
    res.x = inner.x;

    problem.constraints(res.x, g, nullptr);
    for (Eigen::Index i = 0; i < m; ++i) {
      res.multipliers(i) = std::max(0.0, res.multipliers(i) - penalty * g(i));
    }
    measure(res.x);
    if (res.max_violation <= settings.feasibility_tolerance &&
        res.stationarity <= settings.stationarity_tolerance &&
        res.complementarity <= std::max(settings.feasibility_tolerance, 1e-8)) {
      res.status = SolveStatus::Converged;
      return res;
    }
    if (res.max_violation > 0.25 * prev_violation && res.max_violation > settings.feasibility_tolerance) {
      penalty = std::min(settings.max_penalty, penalty * settings.penalty_growth);
    }
    prev_violation = res.max_violation;
    inner_tol = std::max(0.1 * settings.stationarity_tolerance, inner_tol * 0.1);
  }
  res.status = res.max_violation <= settings.feasibility_tolerance ? SolveStatus::MaxIterations
                                                                   : SolveStatus::Infeasible;
  return res;
}

}  // namespace cstrans
