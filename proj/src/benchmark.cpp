#include "cstrans/benchmark.hpp"

#include <stdexcept>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "cstrans/linalg.hpp"

namespace cstrans {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename F>
double time_us(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

Wrench hover_wrench(int n) {
  Wrench w;
  w.force = Vector3(0.0, 0.0, 0.31 * n / 3.0 * kGravity);
  return w;
}

}  // namespace

AllocationGeometry benchmark_geometry(int n, double robot_clearance) {
  const double radius = std::max(0.5, 1.2 * n * robot_clearance / (2.0 * std::numbers::pi));
  PayloadState payload;
  payload.position = Vector3(0.0, 0.0, 1.0);
  std::vector<CableParams> cables;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    CableParams c;
    c.attach_offset = Vector3(radius * std::cos(a), radius * std::sin(a), 0.0);
    cables.push_back(c);
  }
  return AllocationGeometry::from_payload(payload, cables);
}

std::vector<BenchmarkRow> benchmark_allocators(const std::vector<int>& team_sizes, int repetitions,
                                               const SafetyParams& params) {
  if (repetitions < 1) throw std::invalid_argument("benchmark: repetitions must be >= 1");
  std::vector<BenchmarkRow> rows;
  for (int n : team_sizes) {
    if (n < 3) throw std::invalid_argument("benchmark: team size must be >= 3");
    const AllocationGeometry geom = benchmark_geometry(n, params.robot_clearance);
    const Wrench w = hover_wrench(n);
    const MatrixX p = build_P(geom);
    const TensionSet mu_bar = distribute_min_norm(p, w);
    const std::vector<Vector3> robots = kinematic_positions(geom, mu_bar);
    const Vector3 radial = Vector3(robots[0].x(), robots[0].y(), 0.0).normalized();
    const Vector3 human = robots[0] + 0.7 * params.human_clearance * radial;

    std::vector<double> t_dist, t_grad, t_opt;
    BenchmarkRow row;
    row.n = n;
    for (int r = 0; r < repetitions; ++r) {
      TensionSet sink;
      t_dist.push_back(time_us([&] { sink = distribute_min_norm(build_P(geom), w); }));

      GradientModifier grad({params.a, params.b});
      t_grad.push_back(time_us([&] { grad.step(mu_bar, geom, p, human, robots); }));

      OptimizeResult opt;
      t_opt.push_back(time_us([&] {
        const MatrixX g = nullspace_basis(p);
        opt = optimize_modifier(mu_bar, g, geom, human, params, VectorX::Zero(g.cols()));
      }));
      row.optimize_iterations = opt.solve.inner_iterations;
      row.optimize_status = to_string(opt.solve.status);
    }
    row.distribute_us = median(t_dist);
    row.gradient_us = median(t_grad);
    row.gradient_per_robot_us = row.gradient_us / n;
    row.optimize_us = median(t_opt);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json benchmark_to_json(const std::vector<BenchmarkRow>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows) {
    a.push_back({{"n", r.n},
                 {"distribute_us", r.distribute_us},
                 {"gradient_us", r.gradient_us},
                 {"gradient_per_robot_us", r.gradient_per_robot_us},
                 {"optimize_us", r.optimize_us},
                 {"optimize_iterations", r.optimize_iterations},
                 {"optimize_status", r.optimize_status}});
  }
  return {{"schema", "cstrans.benchmark"}, {"version", 1}, {"rows", a}};
}

}  // namespace cstrans
