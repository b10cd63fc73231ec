#pragma once

// Summary metrics over a run log.

#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstrans/run_log.hpp"

namespace cstrans {

double rmse(const std::vector<double>& estimate, const std::vector<double>& truth);

struct ReportSummary {
  long records = 0;
  Vector6 wrench_rmse = Vector6::Zero();      // filtered estimate vs applied
  Vector6 wrench_rmse_raw = Vector6::Zero();  // unfiltered estimate vs applied
  std::optional<double> min_human_distance;
  double min_robot_distance = 0.0;
  double tracking_rms = 0.0;  // |payload position - desired position| after settling
  double max_nullspace_residual = 0.0;
  /// Applied force (moment) over realized velocity (rate) per axis, averaged
  /// over the last second of the final interval in which that axis is loaded.
  /// NaN when the axis is never loaded.
  Vector6 impedance_ratio = Vector6::Constant(std::numeric_limits<double>::quiet_NaN());
};

/// `settle_time` excludes the initial transient from the tracking RMS.
ReportSummary summarize(const RunLog& log, double settle_time = 2.0);
nlohmann::json summary_to_json(const ReportSummary& s);

/// Minimum human-robot and robot-robot distances recomputed from positions.
struct DistanceExtrema {
  std::optional<double> human;
  double robot = 0.0;
};
DistanceExtrema recompute_distances(const RunLog& log);

}  // namespace cstrans
