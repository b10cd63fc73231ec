#pragma once

// Wall-time scaling of the allocators with team size.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstrans/safety_allocator.hpp"

namespace cstrans {

struct BenchmarkRow {
  int n = 0;
  double distribute_us = 0.0;          // median per call
  double gradient_us = 0.0;
  double gradient_per_robot_us = 0.0;
  double optimize_us = 0.0;
  int optimize_iterations = 0;
  std::string optimize_status;
};

/// Regular n-gon attach layout sized so neighbouring robots start at least
/// 1.2 r_r apart; the human stands inside the clearance of robot 0.
AllocationGeometry benchmark_geometry(int n, double robot_clearance);

std::vector<BenchmarkRow> benchmark_allocators(const std::vector<int>& team_sizes, int repetitions,
                                               const SafetyParams& params = {});

nlohmann::json benchmark_to_json(const std::vector<BenchmarkRow>& rows);

}  // namespace cstrans
