#include "cstrans/trajectory.hpp"

#include <algorithm>

namespace cstrans {

PolySample eval_polynomial(const std::vector<double>& coeffs, double t) {
  PolySample s;
  double p = 1.0;  // t^i
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    s.value += coeffs[i] * p;
    p *= t;
  }
  p = 1.0;
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    s.d1 += static_cast<double>(i) * coeffs[i] * p;
    p *= t;
  }
  p = 1.0;
  for (std::size_t i = 2; i < coeffs.size(); ++i) {
    s.d2 += static_cast<double>(i * (i - 1)) * coeffs[i] * p;
    p *= t;
  }
  return s;
}

ReferenceTrajectory::ReferenceTrajectory(TrajectorySpec spec) : spec_(std::move(spec)) {}

AdmittanceReference ReferenceTrajectory::sample(double t) const {
  AdmittanceReference r;
  switch (spec_.kind) {
    case TrajectorySpec::Kind::Hover:
      r.pose.head<3>() = spec_.hover_position;
      r.pose(5) = spec_.hover_yaw;
      break;
    case TrajectorySpec::Kind::Waypoints: {
      const auto& w = spec_.waypoints;
      if (t <= w.front().t || w.size() == 1) {
        r.pose.head<3>() = w.front().position;
        r.pose(5) = w.front().yaw;
        break;
      }
      if (t >= w.back().t) {
        r.pose.head<3>() = w.back().position;
        r.pose(5) = w.back().yaw;
        break;
      }
      const auto it = std::upper_bound(w.begin(), w.end(), t,
                                       [](double v, const WaypointSpec& p) { return v < p.t; });
      const WaypointSpec& b = *it;
      const WaypointSpec& a = *(it - 1);
      const double span = b.t - a.t;
      const double s = (t - a.t) / span;
      r.pose.head<3>() = a.position + s * (b.position - a.position);
      r.pose(5) = wrap_angle(a.yaw + s * wrap_angle(b.yaw - a.yaw));
      r.velocity.head<3>() = (b.position - a.position) / span;
      r.velocity(5) = wrap_angle(b.yaw - a.yaw) / span;
      break;
    }
    case TrajectorySpec::Kind::Polynomial: {
      double local = std::max(0.0, t - spec_.polynomial_start);
      std::size_t idx = 0;
      bool past_end = false;
      while (idx < spec_.segments.size() && local > spec_.segments[idx].duration) {
        if (idx + 1 == spec_.segments.size()) {
          past_end = true;
          break;
        }
        local -= spec_.segments[idx].duration;
        ++idx;
      }
      idx = std::min(idx, spec_.segments.size() - 1);
      const PolynomialSegment& seg = spec_.segments[idx];
      if (past_end) local = seg.duration;
      const std::vector<double>* axes[4] = {&seg.x, &seg.y, &seg.z, &seg.yaw};
      const int slots[4] = {0, 1, 2, 5};
      for (int a = 0; a < 4; ++a) {
        const PolySample p = eval_polynomial(*axes[a], local);
        r.pose(slots[a]) = p.value;
        if (!past_end) {
          r.velocity(slots[a]) = p.d1;
          r.acceleration(slots[a]) = p.d2;
        }
      }
      r.pose(5) = wrap_angle(r.pose(5));
      break;
    }
  }
  return r;
}

Wrench scripted_wrench(const std::vector<WrenchEvent>& script, double t) {
  Wrench w;
  for (const auto& e : script) {
    if (t >= e.start && t < e.start + e.duration) {
      w.force += e.force;
      w.moment += e.moment;
    }
  }
  return w;
}

std::optional<Vector3> human_position(const std::vector<HumanPathPoint>& path, double t) {
  if (path.empty()) return std::nullopt;
  if (t <= path.front().t) return path.front().position;
  if (t >= path.back().t) return path.back().position;
  const auto it = std::upper_bound(path.begin(), path.end(), t,
                                   [](double v, const HumanPathPoint& p) { return v < p.t; });
  const HumanPathPoint& b = *it;
  const HumanPathPoint& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return Vector3(a.position + s * (b.position - a.position));
}

}  // namespace cstrans
