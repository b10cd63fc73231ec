#include "doctest.h"

#include <random>
#include <stdexcept>

#include "cstrans/config.hpp"
#include "cstrans/dynamics.hpp"
#include "cstrans/simulation.hpp"
#include "oracles.hpp"

using namespace cstrans;

namespace {

struct Hover {
  ScenarioConfig config;
  SystemParams params;
  WorldState world;
  std::vector<RobotCommand> controls;
};

// Equilibrium built by hand: each cable carries m_L g / 3 vertically, each
// quadrotor thrusts its own weight plus that share.
Hover hover() {
  Hover h;
  h.params = h.config.system_params();
  h.world = hover_world(h.config);
  const double share = h.params.payload.mass * h.params.gravity / 3.0;
  for (std::size_t k = 0; k < 3; ++k) {
    h.controls.push_back({h.params.quads[k].mass * h.params.gravity + share, Vector3::Zero()});
  }
  return h;
}

Vector3 total_momentum_rate(const WorldRate& rate, const SystemParams& p) {
  Vector3 sum = p.payload.mass * rate.payload.acceleration;
  for (std::size_t k = 0; k < p.team_size(); ++k) sum += p.quads[k].mass * rate.quads[k].acceleration;
  return sum;
}

}  // namespace

TEST_CASE("cable force is zero when slack and follows Hooke's law when taut") {
  CableParams c;
  c.length = 1.0;
  c.stiffness = 500.0;
  c.damping = 0.0;
  const Vector3 att = Vector3::Zero();
  CHECK(cable_tension_truth(Vector3(0, 0, 0.99), Vector3::Zero(), att, Vector3::Zero(), c).isZero(0.0));
  const Vector3 f = cable_tension_truth(Vector3(0, 0, 1.001), Vector3::Zero(), att, Vector3::Zero(), c);
  CHECK((f - Vector3(0, 0, -0.5)).norm() < 1e-9);

  // Damping adds along the cable and never turns the force into a push.
  c.damping = 20.0;
  const Vector3 pulling = cable_tension_truth(Vector3(0, 0, 1.001), Vector3(0, 0, 0.01), att,
                                              Vector3::Zero(), c);
  CHECK((pulling - Vector3(0, 0, -0.7)).norm() < 1e-9);
  const Vector3 closing = cable_tension_truth(Vector3(0, 0, 1.001), Vector3(0, 0, -1.0), att,
                                              Vector3::Zero(), c);
  CHECK(closing.isZero(0.0));
}

TEST_CASE("motor thrust and its inverse") {
  CHECK(motor_thrust({700, 700, 700, 700}, 1e-6) == doctest::Approx(1.96).epsilon(1e-12));
  const MotorSpeeds zero = speeds_for_thrust(0.0, 1e-6);
  for (double w : zero) CHECK(w == 0.0);
  for (double f : {0.1, 2.4525, 7.9}) {
    CHECK(std::abs(motor_thrust(speeds_for_thrust(f, 1.5e-6), 1.5e-6) - f) < 1e-12);
  }
  CHECK_THROWS_AS(speeds_for_thrust(-0.1, 1e-6), NegativeThrust);
}

TEST_CASE("static equilibrium has vanishing derivatives") {
  const Hover h = hover();
  const WorldRate rate = derivatives(h.world, h.controls, h.params);
  CHECK(rate.payload.velocity.norm() < 1e-6);
  CHECK(rate.payload.acceleration.norm() < 1e-6);
  CHECK(rate.payload.angular_acceleration.norm() < 1e-6);
  for (const auto& q : rate.quads) {
    CHECK(q.acceleration.norm() < 1e-6);
    CHECK(q.angular_acceleration.norm() < 1e-6);
  }
}

TEST_CASE("free fall with slack cables") {
  Hover h = hover();
  for (auto& q : h.world.quads) q.position.z() -= 0.5;
  for (auto& c : h.controls) c.thrust = 0.0;
  const WorldRate rate = derivatives(h.world, h.controls, h.params);
  CHECK((rate.payload.acceleration - Vector3(0, 0, -9.81)).norm() < 1e-12);
  for (const auto& q : rate.quads) CHECK((q.acceleration - Vector3(0, 0, -9.81)).norm() < 1e-12);
}

TEST_CASE("cable forces cancel in the total momentum balance") {
  Hover h = hover();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.05);
  for (auto& q : h.world.quads) {
    q.position += Vector3(n(rng), n(rng), n(rng));
    q.velocity = Vector3(n(rng), n(rng), n(rng));
    q.rotation = oracle::angle_axis(Vector3(n(rng), n(rng), n(rng)));
  }
  h.world.payload.angular_velocity = Vector3(n(rng), n(rng), n(rng));
  h.world.external.force = Vector3(0.3, -0.2, 0.1);
  h.world.external.moment = Vector3(0.01, 0.02, -0.03);
  const WorldRate rate = derivatives(h.world, h.controls, h.params);

  double total_mass = h.params.payload.mass;
  Vector3 thrust = Vector3::Zero();
  for (std::size_t k = 0; k < 3; ++k) {
    total_mass += h.params.quads[k].mass;
    thrust += h.controls[k].thrust * h.world.quads[k].rotation.col(2);
  }
  const Vector3 expected = thrust + h.world.external.force - total_mass * 9.81 * Vector3::UnitZ();
  CHECK((total_momentum_rate(rate, h.params) - expected).norm() < 1e-9);
}

TEST_CASE("rk4 preserves the equilibrium") {
  const Hover h = hover();
  WorldState w = h.world;
  for (int i = 0; i < 1000; ++i) w = step_rk4(w, h.controls, h.params, 0.0025);
  CHECK((w.payload.position - h.world.payload.position).norm() < 1e-4);
  CHECK(w.time == doctest::Approx(2.5));
}

TEST_CASE("rk4 conserves energy without damping or thrust") {
  Hover h = hover();
  for (auto& c : h.params.cables) c.damping = 0.0;
  for (auto& c : h.controls) c.thrust = 0.0;
  h.world.quads[0].velocity = Vector3(0.2, 0.0, 0.3);
  h.world.payload.angular_velocity = Vector3(0.1, -0.2, 0.3);
  const double e0 = mechanical_energy(h.world, h.params);
  WorldState w = h.world;
  for (int i = 0; i < 1000; ++i) w = step_rk4(w, h.controls, h.params, 5e-4);
  CHECK(std::abs(mechanical_energy(w, h.params) - e0) < 1e-4 * std::abs(e0));
  for (const auto& q : w.quads)
    CHECK((q.rotation.transpose() * q.rotation - Matrix3::Identity()).norm() < 1e-9);

  // With damping the energy can only fall.
  Hover d = hover();
  for (auto& c : d.controls) c.thrust = 0.0;
  d.world.quads[0].velocity = Vector3(0.2, 0.0, 0.3);
  double previous = mechanical_energy(d.world, d.params);
  w = d.world;
  for (int i = 0; i < 200; ++i) {
    w = step_rk4(w, d.controls, d.params, 5e-4);
    const double e = mechanical_energy(w, d.params);
    CHECK(e <= previous + 1e-9);
    previous = e;
  }
}

TEST_CASE("rk4 rejects invalid steps") {
  const Hover h = hover();
  CHECK_THROWS_AS(step_rk4(h.world, h.controls, h.params, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(step_rk4(h.world, h.controls, h.params, -1e-3), std::invalid_argument);
  CHECK_THROWS_AS(step_rk4(h.world, h.controls, h.params, 0.02), std::invalid_argument);
  std::vector<RobotCommand> two(h.controls.begin(), h.controls.begin() + 2);
  CHECK_THROWS(step_rk4(h.world, two, h.params, 1e-3));
}

TEST_CASE("cable forces on quads match the per-cable law") {
  const Hover h = hover();
  const auto forces = cable_forces_on_quads(h.world, h.params);
  REQUIRE(forces.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const Vector3 expected = cable_tension_truth(
        h.world.quads[k].position, h.world.quads[k].velocity,
        attach_position(h.world.payload, h.params.cables[k]),
        attach_velocity(h.world.payload, h.params.cables[k]), h.params.cables[k]);
    CHECK((forces[k] - expected).norm() == 0.0);
    CHECK((forces[k] - Vector3(0, 0, -h.params.payload.mass * 9.81 / 3.0)).norm() < 1e-9);
  }
}

TEST_CASE("attach point kinematics") {
  PayloadState p;
  p.position = Vector3(1, 2, 3);
  p.rotation = rot_z(M_PI / 2);
  p.velocity = Vector3(0.1, 0, 0);
  p.angular_velocity = Vector3(0, 0, 2.0);
  CableParams c;
  c.attach_offset = Vector3(0.5, 0, 0);
  CHECK((attach_position(p, c) - Vector3(1, 2.5, 3)).norm() < 1e-15);
  // v + R (omega x rho) = (0.1, 0, 0) + Rz(90) (0, 1, 0)
  CHECK((attach_velocity(p, c) - Vector3(-0.9, 0, 0)).norm() < 1e-15);
}

TEST_CASE("noise-free measurement equals ground truth") {
  SystemParams params;
  params.payload.mass = 0.31;
  params.quads.push_back({0.25, Matrix3::Identity() * 2e-3, 1.5e-6});
  CableParams c;
  c.length = 1.0;
  params.cables.push_back(c);
  WorldState w;
  QuadrotorState q;
  q.position = Vector3(0, 0, 1);
  q.rotation = euler_zyx_to_rot(EulerZYX{0.3, 0.1, -0.2});
  q.angular_velocity = Vector3(0.1, 0.2, 0.3);
  w.quads.push_back(q);

  std::mt19937_64 rng(1);
  const Observation obs = observe(w, params, MeasurementNoise{}, rng);
  const Measurement& m = obs.robots.at(0);
  CHECK((m.cable_direction - Vector3(0, 0, -1)).norm() == 0.0);
  CHECK((m.position - q.position).norm() == 0.0);
  CHECK(std::abs(m.euler.yaw - 0.3) < 1e-12);
  CHECK(std::abs(m.euler.pitch - 0.1) < 1e-12);
  CHECK(std::abs(m.euler.roll + 0.2) < 1e-12);
  CHECK((m.angular_velocity - q.angular_velocity).norm() == 0.0);
  CHECK(m.slack);  // exactly at rest length
  const Measurement truth = measure_robot(w, params, 0);
  CHECK((truth.vector() - m.vector()).norm() == 0.0);
  CHECK((obs.payload.position - w.payload.position).norm() == 0.0);
}

TEST_CASE("measurement noise is zero mean with the configured spread") {
  const Hover h = hover();
  MeasurementNoise noise;
  noise.position = 0.01;
  std::mt19937_64 rng(42);
  const int draws = 20000;
  Vector3 sum = Vector3::Zero();
  double sq = 0.0;
  const Vector3 truth = h.world.quads[0].position;
  for (int i = 0; i < draws; ++i) {
    const Vector3 e = observe(h.world, h.params, noise, rng).robots[0].position - truth;
    sum += e;
    sq += e.squaredNorm();
  }
  const Vector3 mean = sum / draws;
  const double sigma = std::sqrt(sq / (3.0 * draws));
  // 5 standard errors on the mean, 3 % on the spread
  CHECK(mean.norm() < 5.0 * 0.01 / std::sqrt(static_cast<double>(draws)) * std::sqrt(3.0));
  CHECK(sigma == doctest::Approx(0.01).epsilon(0.03));
}

TEST_CASE("observation is reproducible for a fixed seed") {
  const Hover h = hover();
  const MeasurementNoise noise = ScenarioConfig::default_sensor_noise();
  std::mt19937_64 a(9), b(9);
  const Observation oa = observe(h.world, h.params, noise, a);
  const Observation ob = observe(h.world, h.params, noise, b);
  for (std::size_t k = 0; k < 3; ++k) CHECK((oa.robots[k].vector() - ob.robots[k].vector()).norm() == 0.0);
}
