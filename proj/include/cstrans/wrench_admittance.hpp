#pragma once

// Quasi-static external wrench estimate from cable tensions, and the 6-DoF
// virtual mass-spring-damper that offsets the payload reference.

#include <vector>

#include "cstrans/allocation.hpp"
#include "cstrans/payload_controller.hpp"
#include "cstrans/types.hpp"

namespace cstrans {

/// [F_H; M_H] = -P mu + [m_L g e3; 0], mu the stacked forces on the payload.
Wrench estimate_payload_wrench(const TensionSet& mu, const MatrixX& p, double payload_mass,
                               double gravity = kGravity);

class StaleTension : public Error {
 public:
  StaleTension() : Error("tension estimate older than the staleness limit") {}
};

/// Wrench estimator with a per-robot staleness guard. When any tension is
/// older than `max_age` the previous estimate is held and flagged.
class WrenchEstimator {
 public:
  WrenchEstimator(double payload_mass, double max_age, double gravity = kGravity);

  struct Result {
    Wrench wrench;
    bool stale = false;
  };

  Result estimate(const TensionSet& mu, const std::vector<double>& stamps, double now,
                  const MatrixX& p);
  /// Same as estimate() but throws StaleTension instead of holding.
  Wrench estimate_strict(const TensionSet& mu, const std::vector<double>& stamps, double now,
                         const MatrixX& p) const;

  void reset() { last_ = Wrench{}; }

 private:
  double mass_;
  double max_age_;
  double gravity_;
  Wrench last_;
};

/// Diagonal gains; indices 0-2 translate x, y, z, 3-5 are roll, pitch, yaw.
struct AdmittanceGains {
  Vector6 mass = (Vector6() << 0.25, 0.25, 0.25, 0.1, 0.1, 0.1).finished();
  Vector6 damping = (Vector6() << 5.0, 5.0, 5.0, 0.25, 0.25, 0.25).finished();
  Vector6 stiffness = Vector6::Zero();

  void validate() const;  // throws ConfigError
};

struct AdmittanceState {
  Vector6 e = Vector6::Zero();
  Vector6 e_dot = Vector6::Zero();
};

/// Reference trajectory sample in the admittance coordinates
/// (x, y, z, roll, pitch, yaw) and its first two derivatives.
struct AdmittanceReference {
  Vector6 pose = Vector6::Zero();
  Vector6 velocity = Vector6::Zero();
  Vector6 acceleration = Vector6::Zero();
};

struct AdmittanceOutput {
  Vector6 pose = Vector6::Zero();
  Vector6 velocity = Vector6::Zero();
  Vector6 acceleration = Vector6::Zero();
  AdmittanceState next;
};

/// RK4 step of M e'' + D e' + K e = w with w held over the step. dt in (0, 0.05].
AdmittanceOutput admittance_step(const AdmittanceState& s, const Vector6& wrench,
                                 const AdmittanceGains& gains, const AdmittanceReference& ref,
                                 double dt);

/// Payload controller reference for an admittance output.
PayloadReference to_payload_reference(const AdmittanceOutput& out);

/// Exact solution of m e'' + d e' + k e = f (constant f) on one axis.
struct AxisSolution {
  double e = 0.0;
  double e_dot = 0.0;
};
AxisSolution closed_form_axis(double m, double d, double k, double f, double e0, double e_dot0,
                              double t);

/// Slowest decay rate (negated real part of the dominant root) of m s^2 + d s + k.
double dominant_decay_rate(double m, double d, double k);

/// First-order low-pass on the stacked wrench; cutoff <= 0 disables it.
class WrenchFilter {
 public:
  explicit WrenchFilter(double cutoff_hz = 10.0) : cutoff_hz_(cutoff_hz) {}
  Vector6 filter(const Vector6& w, double dt);
  void reset() { initialized_ = false; }
  bool enabled() const { return cutoff_hz_ > 0.0; }

 private:
  double cutoff_hz_;
  bool initialized_ = false;
  Vector6 state_ = Vector6::Zero();
};

}  // namespace cstrans
