#pragma once

// Desired payload wrench -> per-cable desired tensions, with a safety
// modifier confined to null(P).

#include <optional>
#include <string>
#include <vector>

#include "cstrans/allocation.hpp"
#include "cstrans/constrained_solver.hpp"

namespace cstrans {

enum class SafetyMode { Off, Gradient, Optimization };

const char* to_string(SafetyMode mode);
/// Throws ConfigError on an unknown name.
SafetyMode safety_mode_from_string(const std::string& name);

struct SafetyParams {
  SafetyMode mode = SafetyMode::Off;
  double a = 0.01;             // gradient gain per control step
  double b = 2.0;              // gradient decay [1/m]
  double human_clearance = 1.0;   // r_h [m]
  double robot_clearance = 0.75;  // r_r [m]
  double max_tension = 6.0;       // per-robot warning bound [N]
  SolverSettings solver{};

  void validate() const;  // throws ConfigError
};

/// Kinematic robot positions for tensions mu (x_k = p_att,k + l_k unit(mu_k)).
std::vector<Vector3> kinematic_positions(const AllocationGeometry& geometry, const TensionSet& mu);

struct ClearanceSlacks {
  double human = 0.0;  // min_k |p_O - x_k| - r_h  [m]
  double robot = 0.0;  // min_{i<j} |x_i - x_j| - r_r  [m]
};
ClearanceSlacks clearance_slacks(const std::vector<Vector3>& positions, const Vector3& object,
                                 double human_clearance, double robot_clearance);

struct OptimizeResult {
  VectorX c;
  TensionSet tensions;  // mu_bar + G c
  SolveResult solve;
  ClearanceSlacks slacks;
};

/// min |mu_bar + G c|^2 s.t. |p_O - x_k|^2 >= r_h^2, |x_i - x_j|^2 >= r_r^2.
OptimizeResult optimize_modifier(const TensionSet& mu_bar, const MatrixX& g,
                                 const AllocationGeometry& geometry, const Vector3& object,
                                 const SafetyParams& params, const VectorX& c0);

/// The constrained problem solved by optimize_modifier; exposed for tests.
ConstrainedProblem modifier_problem(const TensionSet& mu_bar, const MatrixX& g,
                                    const AllocationGeometry& geometry, const Vector3& object,
                                    const SafetyParams& params);

struct AllocationDiagnostics {
  double objective = 0.0;          // |mu_des|^2
  double nullspace_residual = 0.0; // |P (mu_des - mu_bar)|
  double wrench_residual = 0.0;    // |P mu_des - w|
  ClearanceSlacks slacks;          // at the kinematic positions of mu_des
  bool degenerate = false;
  bool infeasible = false;
  bool tension_bound_exceeded = false;
  std::optional<SolveStatus> solver_status;
  int solver_iterations = 0;
  double stationarity = 0.0;
};

struct AllocationResult {
  TensionSet mu_bar;
  TensionSet mu_des;
  AllocationDiagnostics diagnostics;
};

/// Stateful allocator: keeps the gradient modifier and the optimizer warm start.
class SafetyAllocator {
 public:
  explicit SafetyAllocator(SafetyParams params = {});

  /// `robot_positions` are the measured positions used by the gradient gain Q_k.
  AllocationResult allocate(const Wrench& wrench, const AllocationGeometry& geometry,
                            const Vector3& object, const std::vector<Vector3>& robot_positions);

  void reset();
  const SafetyParams& params() const { return params_; }
  void set_params(const SafetyParams& params);
  void set_mode(SafetyMode mode);

 private:
  SafetyParams params_;
  GradientModifier gradient_;
  VectorX last_modifier_;           // v = G c of the previous step
  VectorX last_feasible_modifier_;
};

}  // namespace cstrans
