#include "cstrans/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cstrans {

Vector3 cable_tension_truth(const Vector3& quad_position, const Vector3& quad_velocity,
                            const Vector3& attach_position, const Vector3& attach_velocity,
                            const CableParams& cable) {
  const Vector3 d = attach_position - quad_position;
  const double dist = d.norm();
  if (dist <= cable.length) return Vector3::Zero();
  const Vector3 u = d / dist;
  const double stretch_rate = u.dot(attach_velocity - quad_velocity);
  const double magnitude =
      std::max(0.0, cable.stiffness * (dist - cable.length) + cable.damping * stretch_rate);
  return magnitude * u;
}

double motor_thrust(const MotorSpeeds& speeds, double motor_constant) {
  double f = 0.0;
  for (double w : speeds) f += motor_constant * w * w;
  return f;
}

MotorSpeeds speeds_for_thrust(double thrust, double motor_constant) {
  if (thrust < 0.0) throw NegativeThrust();
  const double w = std::sqrt(thrust / (4.0 * motor_constant));
  return {w, w, w, w};
}

Vector3 attach_position(const PayloadState& payload, const CableParams& cable) {
  return payload.position + payload.rotation * cable.attach_offset;
}

Vector3 attach_velocity(const PayloadState& payload, const CableParams& cable) {
  return payload.velocity + payload.rotation * payload.angular_velocity.cross(cable.attach_offset);
}

std::vector<Vector3> cable_forces_on_quads(const WorldState& world, const SystemParams& params) {
  std::vector<Vector3> out(world.quads.size());
  for (std::size_t k = 0; k < world.quads.size(); ++k) {
    const auto& c = params.cables[k];
    out[k] = cable_tension_truth(world.quads[k].position, world.quads[k].velocity,
                                 attach_position(world.payload, c),
                                 attach_velocity(world.payload, c), c);
  }
  return out;
}

WorldRate derivatives(const WorldState& world, std::span<const RobotCommand> controls,
                      const SystemParams& params) {
  const std::size_t n = world.quads.size();
  if (controls.size() != n || params.cables.size() != n || params.quads.size() != n) {
    throw std::invalid_argument("team size mismatch");
  }
  const Vector3 g = params.gravity * Vector3::UnitZ();
  const PayloadState& pl = world.payload;
  WorldRate rate;
  rate.quads.resize(n);

  Vector3 force = world.external.force - params.payload.mass * g;
  Vector3 moment = world.external.moment;
  const auto on_quads = cable_forces_on_quads(world, params);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& q = world.quads[k];
    const auto& body = params.quads[k];
    const Vector3 on_payload = -on_quads[k];
    force += on_payload;
    moment += params.cables[k].attach_offset.cross(pl.rotation.transpose() * on_payload);

    const double thrust = controls[k].thrust;
    BodyRate& r = rate.quads[k];
    r.velocity = q.velocity;
    r.acceleration = (thrust * (q.rotation * Vector3::UnitZ()) + on_quads[k]) / body.mass - g;
    r.omega = q.angular_velocity;
    r.angular_acceleration = body.inertia.ldlt().solve(
        controls[k].moment - q.angular_velocity.cross(body.inertia * q.angular_velocity));
  }
  rate.payload.velocity = pl.velocity;
  rate.payload.acceleration = force / params.payload.mass;
  rate.payload.omega = pl.angular_velocity;
  rate.payload.angular_acceleration = params.payload.inertia.ldlt().solve(
      moment - pl.angular_velocity.cross(params.payload.inertia * pl.angular_velocity));
  return rate;
}

namespace {

template <typename Body>
Body advance(const Body& base, const BodyRate& k, double h, Vector3* sigma) {
  Body out = base;
  out.position = base.position + h * k.velocity;
  out.velocity = base.velocity + h * k.acceleration;
  out.angular_velocity = base.angular_velocity + h * k.angular_acceleration;
  *sigma = h * k.omega;
  out.rotation = base.rotation * so3_exp(*sigma);
  return out;
}

struct StageRates {
  std::vector<BodyRate> bodies;  // index 0 payload, 1..n quads
};

StageRates flatten(const WorldRate& r) {
  StageRates s;
  s.bodies.reserve(r.quads.size() + 1);
  s.bodies.push_back(r.payload);
  for (const auto& q : r.quads) s.bodies.push_back(q);
  return s;
}

// k.omega is replaced by dexp^{-1}_sigma(omega) so the stages integrate the
// local coordinate of the rotation rather than the body rate itself.
void correct_omega(StageRates& s, const std::vector<Vector3>& sigma) {
  for (std::size_t i = 0; i < s.bodies.size(); ++i) {
    s.bodies[i].omega = dexp_inv_truncated(sigma[i], s.bodies[i].omega);
  }
}

WorldState stage_state(const WorldState& w0, const StageRates& k, double h,
                       std::vector<Vector3>& sigma) {
  WorldState w = w0;
  sigma.resize(k.bodies.size());
  w.payload = advance(w0.payload, k.bodies[0], h, &sigma[0]);
  for (std::size_t i = 0; i < w0.quads.size(); ++i) {
    w.quads[i] = advance(w0.quads[i], k.bodies[i + 1], h, &sigma[i + 1]);
  }
  return w;
}

void check_finite(const WorldState& w) {
  auto bad = [](const auto& m) { return !m.allFinite() || m.norm() > 1e6; };
  auto body_bad = [&](const auto& b) {
    return bad(b.position) || bad(b.velocity) || bad(b.angular_velocity) || bad(b.rotation);
  };
  if (body_bad(w.payload)) throw NumericalBlowup("payload state diverged at t=" + std::to_string(w.time));
  for (std::size_t k = 0; k < w.quads.size(); ++k) {
    if (body_bad(w.quads[k])) {
      throw NumericalBlowup("quadrotor " + std::to_string(k) + " diverged at t=" +
                            std::to_string(w.time));
    }
  }
}

}  // namespace

WorldState step_rk4(const WorldState& world, std::span<const RobotCommand> controls,
                    const SystemParams& params, double dt) {
  if (!(dt > 0.0) || dt > 0.01) throw std::invalid_argument("step_rk4: dt must lie in (0, 0.01]");
  for (const auto& c : controls) {
    if (!std::isfinite(c.thrust) || !c.moment.allFinite()) {
      throw NumericalBlowup("non-finite control input");
    }
  }

  std::vector<Vector3> sigma;
  StageRates k1 = flatten(derivatives(world, controls, params));
  // At the base point sigma = 0 so dexp^{-1} is the identity.

  WorldState s2 = stage_state(world, k1, 0.5 * dt, sigma);
  StageRates k2 = flatten(derivatives(s2, controls, params));
  correct_omega(k2, sigma);

  WorldState s3 = stage_state(world, k2, 0.5 * dt, sigma);
  StageRates k3 = flatten(derivatives(s3, controls, params));
  correct_omega(k3, sigma);

  WorldState s4 = stage_state(world, k3, dt, sigma);
  StageRates k4 = flatten(derivatives(s4, controls, params));
  correct_omega(k4, sigma);

  StageRates combined = k1;
  for (std::size_t i = 0; i < combined.bodies.size(); ++i) {
    auto& c = combined.bodies[i];
    const auto& b2 = k2.bodies[i];
    const auto& b3 = k3.bodies[i];
    const auto& b4 = k4.bodies[i];
    c.velocity = (c.velocity + 2.0 * b2.velocity + 2.0 * b3.velocity + b4.velocity) / 6.0;
    c.acceleration =
        (c.acceleration + 2.0 * b2.acceleration + 2.0 * b3.acceleration + b4.acceleration) / 6.0;
    c.omega = (c.omega + 2.0 * b2.omega + 2.0 * b3.omega + b4.omega) / 6.0;
    c.angular_acceleration = (c.angular_acceleration + 2.0 * b2.angular_acceleration +
                              2.0 * b3.angular_acceleration + b4.angular_acceleration) /
                             6.0;
  }
  WorldState out = stage_state(world, combined, dt, sigma);
  out.payload.rotation = orthonormalize(out.payload.rotation);
  for (auto& q : out.quads) q.rotation = orthonormalize(q.rotation);
  out.time = world.time + dt;
  check_finite(out);
  return out;
}

double mechanical_energy(const WorldState& world, const SystemParams& params) {
  const double g = params.gravity;
  const auto& pl = world.payload;
  double e = 0.5 * params.payload.mass * pl.velocity.squaredNorm() +
             0.5 * pl.angular_velocity.dot(params.payload.inertia * pl.angular_velocity) +
             params.payload.mass * g * pl.position.z();
  for (std::size_t k = 0; k < world.quads.size(); ++k) {
    const auto& q = world.quads[k];
    const auto& b = params.quads[k];
    e += 0.5 * b.mass * q.velocity.squaredNorm() +
         0.5 * q.angular_velocity.dot(b.inertia * q.angular_velocity) + b.mass * g * q.position.z();
    const auto& c = params.cables[k];
    const double stretch = (attach_position(pl, c) - q.position).norm() - c.length;
    if (stretch > 0.0) e += 0.5 * c.stiffness * stretch * stretch;
  }
  return e;
}

Eigen::Matrix<double, 18, 1> Measurement::vector() const {
  Eigen::Matrix<double, 18, 1> z;
  z << position, velocity, euler.vector(), angular_velocity, cable_direction, cable_rate;
  return z;
}

Measurement measure_robot(const WorldState& world, const SystemParams& params, std::size_t k) {
  const auto& q = world.quads.at(k);
  const auto& c = params.cables.at(k);
  const Vector3 p_att = attach_position(world.payload, c);
  const Vector3 v_att = attach_velocity(world.payload, c);
  Measurement m;
  m.position = q.position;
  m.velocity = q.velocity;
  m.euler = rot_to_euler_zyx(q.rotation);
  m.angular_velocity = q.angular_velocity;
  const Vector3 d = p_att - q.position;
  m.cable_direction = d / d.norm();
  m.cable_rate = (v_att - q.velocity) / c.length;
  m.slack = d.norm() <= c.length;
  return m;
}

Observation observe(const WorldState& world, const SystemParams& params,
                    const MeasurementNoise& noise, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](double sigma) -> Vector3 {
    if (sigma == 0.0) return Vector3::Zero();
    // Evaluation order of the three draws is fixed for reproducibility.
    const double a = normal(rng);
    const double b = normal(rng);
    const double c = normal(rng);
    return sigma * Vector3(a, b, c);
  };

  Observation obs;
  obs.robots.reserve(world.quads.size());
  for (std::size_t k = 0; k < world.quads.size(); ++k) {
    Measurement m = measure_robot(world, params, k);
    m.position += draw(noise.position);
    m.velocity += draw(noise.velocity);
    const Vector3 e = m.euler.vector() + draw(noise.angle);
    m.euler = {wrap_angle(e(0)), e(1), wrap_angle(e(2))};
    m.angular_velocity += draw(noise.angular_rate);
    if (noise.cable_direction > 0.0) {
      m.cable_direction += draw(noise.cable_direction);
      m.cable_direction.normalize();
    }
    m.cable_rate += draw(noise.cable_rate);
    obs.robots.push_back(m);
  }

  obs.payload = world.payload;
  obs.payload.position += draw(noise.payload_position);
  obs.payload.velocity += draw(noise.payload_velocity);
  if (noise.payload_angle > 0.0) {
    obs.payload.rotation = world.payload.rotation * so3_exp(draw(noise.payload_angle));
  }
  obs.payload.angular_velocity += draw(noise.payload_angular_rate);
  return obs;
}

}  // namespace cstrans
