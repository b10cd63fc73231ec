#include "cstrans/report.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cstrans {

using nlohmann::json;

double rmse(const std::vector<double>& estimate, const std::vector<double>& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("rmse: size mismatch");
  if (estimate.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(estimate.size()));
}

namespace {

double realized_rate(const LogRecord& r, int axis) {
  if (axis < 3) return r.payload_velocity(axis);
  return r.payload_omega(axis - 3);
}

}  // namespace

ReportSummary summarize(const RunLog& log, double settle_time) {
  ReportSummary s;
  s.records = static_cast<long>(log.records.size());
  if (log.records.empty()) return s;

  for (int axis = 0; axis < 6; ++axis) {
    std::vector<double> est, raw, truth;
    for (const auto& r : log.records) {
      est.push_back(r.estimated_wrench(axis));
      raw.push_back(r.estimated_wrench_raw(axis));
      truth.push_back(r.applied_wrench(axis));
    }
    s.wrench_rmse(axis) = rmse(est, truth);
    s.wrench_rmse_raw(axis) = rmse(raw, truth);
  }

  const DistanceExtrema d = recompute_distances(log);
  s.min_human_distance = d.human;
  s.min_robot_distance = d.robot;

  const double t0 = log.records.front().time;
  double sq = 0.0;
  long count = 0;
  for (const auto& r : log.records) {
    s.max_nullspace_residual = std::max(s.max_nullspace_residual, r.nullspace_residual);
    if (r.time - t0 < settle_time) continue;
    sq += (r.payload_position - r.desired_pose.head<3>()).squaredNorm();
    ++count;
  }
  s.tracking_rms = count > 0 ? std::sqrt(sq / static_cast<double>(count)) : 0.0;

  for (int axis = 0; axis < 6; ++axis) {
    // Final loaded interval [begin, end).
    long end = -1;
    for (long i = static_cast<long>(log.records.size()) - 1; i >= 0; --i) {
      if (log.records[static_cast<std::size_t>(i)].applied_wrench(axis) != 0.0) {
        end = i + 1;
        break;
      }
    }
    if (end < 0) continue;
    long begin = end - 1;
    while (begin > 0 && log.records[static_cast<std::size_t>(begin - 1)].applied_wrench(axis) != 0.0) --begin;
    const double t_end = log.records[static_cast<std::size_t>(end - 1)].time;
    double f = 0.0, v = 0.0;
    long m = 0;
    for (long i = begin; i < end; ++i) {
      const LogRecord& r = log.records[static_cast<std::size_t>(i)];
      if (t_end - r.time > 1.0) continue;
      f += r.applied_wrench(axis);
      v += realized_rate(r, axis);
      ++m;
    }
    if (m > 0 && v != 0.0) s.impedance_ratio(axis) = f / v;
  }
  return s;
}

DistanceExtrema recompute_distances(const RunLog& log) {
  DistanceExtrema d;
  d.robot = std::numeric_limits<double>::infinity();
  for (const auto& r : log.records) {
    for (std::size_t i = 0; i < r.robots.size(); ++i) {
      if (r.human) {
        const double h = (*r.human - r.robots[i].position).norm();
        d.human = d.human ? std::min(*d.human, h) : h;
      }
      for (std::size_t j = i + 1; j < r.robots.size(); ++j) {
        d.robot = std::min(d.robot, (r.robots[i].position - r.robots[j].position).norm());
      }
    }
  }
  return d;
}

json summary_to_json(const ReportSummary& s) {
  auto vec = [](const Vector6& v) {
    json a = json::array();
    for (int i = 0; i < 6; ++i) a.push_back(std::isfinite(v(i)) ? json(v(i)) : json(nullptr));
    return a;
  };
  return {{"records", s.records},
          {"wrench_rmse", vec(s.wrench_rmse)},
          {"wrench_rmse_raw", vec(s.wrench_rmse_raw)},
          {"min_human_distance", s.min_human_distance ? json(*s.min_human_distance) : json(nullptr)},
          {"min_robot_distance", s.min_robot_distance},
          {"tracking_rms", s.tracking_rms},
          {"max_nullspace_residual", s.max_nullspace_residual},
          {"impedance_ratio", vec(s.impedance_ratio)}};
}

}  // namespace cstrans
