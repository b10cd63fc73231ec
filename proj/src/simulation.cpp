#include "cstrans/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstrans/messages.hpp"

namespace cstrans {

namespace {

/// Stand-in object position when no human is in the scene.
const Vector3 kFarAway(1e4, 1e4, 1e4);

double min_pairwise(const std::vector<Vector3>& x) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) d = std::min(d, (x[i] - x[j]).norm());
  }
  return d;
}

}  // namespace

WorldState hover_world(const ScenarioConfig& config) {
  const SystemParams params = config.system_params();
  WorldState w;
  w.payload.position = config.initial.payload_position;
  w.payload.rotation = rot_z(config.initial.payload_yaw);
  const AllocationGeometry geom = AllocationGeometry::from_payload(w.payload, params.cables);
  Wrench hover;
  hover.force = params.payload.mass * params.gravity * Vector3::UnitZ();
  const TensionSet mu = distribute_min_norm(build_P(geom), hover);
  for (std::size_t k = 0; k < params.team_size(); ++k) {
    const Vector3 t = tension_of(mu, k);
    const CableParams& c = params.cables[k];
    QuadrotorState q;
    q.position = geom.attach_points[k] + (c.length + t.norm() / c.stiffness) * t.normalized();
    w.quads.push_back(q);
  }
  return w;
}

Simulation::Simulation(ScenarioConfig config)
    : config_(std::move(config)),
      params_(config_.system_params()),
      substeps_(config_.rates.substeps()),
      trajectory_(config_.trajectory),
      payload_controller_(config_.payload_gains, config_.team.payload_mass,
                          config_.team.payload_inertia.asDiagonal(), params_.gravity),
      allocator_(config_.safety),
      wrench_estimator_(config_.team.payload_mass, 3.0 * config_.rates.control_dt, params_.gravity),
      wrench_filter_(config_.admittance.wrench_filter_hz),
      admittance_gains_(config_.admittance.gains) {
  config_.validate();
  restart(config_.seed);
}

void Simulation::restart(std::uint64_t seed) {
  const double now = static_cast<double>(step_) * config_.rates.control_dt;
  world_ = hover_world(config_);
  world_.time = now;
  epoch_ = now;
  rng_.seed(seed);
  payload_controller_.reset();
  allocator_.reset();
  robot_controllers_.clear();
  for (std::size_t k = 0; k < params_.team_size(); ++k) {
    robot_controllers_.emplace_back(config_.robot.gains, params_.quads[k].mass, params_.quads[k].inertia,
                                    params_.cables[k].length, config_.robot.f_max, params_.gravity,
                                    config_.robot.filter_hz);
  }
  filters_.clear();
  last_inputs_.assign(params_.team_size(), UkfInput{});
  tension_stamps_.assign(params_.team_size(), now);
  wrench_estimator_.reset();
  wrench_filter_.reset();
  admittance_ = AdmittanceState{};
  have_odometry_ = false;
  previous_payload_velocity_ = world_.payload.velocity;
  human_override_.reset();
  commanded_wrenches_.clear();
}

void Simulation::submit(const Command& c) { pending_.push_back(c); }

bool Simulation::finished() const { return time() - epoch_ >= config_.duration - 1e-9; }

void Simulation::apply(const Command& c) {
  const double now = time();
  applied_.push_back({step_, now, command_to_json(c)});
  if (const auto* w = std::get_if<ApplyWrench>(&c)) {
    commanded_wrenches_.push_back({w->wrench, now + w->duration});
  } else if (const auto* h = std::get_if<SetHumanPosition>(&c)) {
    human_override_ = h->position;
  } else if (const auto* g = std::get_if<SetAdmittanceGains>(&c)) {
    admittance_gains_ = g->gains;
  } else if (const auto* s = std::get_if<SetSafetyMode>(&c)) {
    SafetyParams p = allocator_.params();
    p.mode = s->mode;
    p.human_clearance = s->human_clearance;
    p.robot_clearance = s->robot_clearance;
    allocator_.set_params(p);
  } else if (const auto* r = std::get_if<ResetCommand>(&c)) {
    restart(r->seed);
  }
}

std::vector<Vector3> Simulation::cable_directions() const {
  std::vector<Vector3> out;
  for (std::size_t k = 0; k < params_.team_size(); ++k) {
    const Vector3 d = attach_position(world_.payload, params_.cables[k]) - world_.quads[k].position;
    out.push_back(d.normalized());
  }
  return out;
}

UkfEvents Simulation::filter_events() const {
  UkfEvents e;
  for (const auto& f : filters_) {
    e.covariance_repairs += f.events().covariance_repairs;
    e.tension_clamps += f.events().tension_clamps;
    e.gimbal_warnings += f.events().gimbal_warnings;
  }
  return e;
}

LogRecord Simulation::step() {
  while (!pending_.empty()) {
    apply(pending_.front());
    pending_.pop_front();
  }

  const double dt = config_.rates.control_dt;
  const double t = time();
  const double local = t - epoch_;
  const std::size_t n = params_.team_size();
  const long local_step = std::lround(local / dt);
  const bool measure = !have_odometry_ || local_step % config_.rates.measurement_divisor == 0;

  if (measure) {
    const bool first = !have_odometry_;
    odometry_ = observe(world_, params_, config_.sensor_noise, rng_);
    have_odometry_ = true;
    const double fc = config_.estimator.payload_rate_filter_hz;
    if (fc > 0.0) {
      const double alpha =
          first ? 1.0 : 1.0 - std::exp(-2.0 * M_PI * fc * dt * config_.rates.measurement_divisor);
      filtered_velocity_ += alpha * (odometry_.payload.velocity - filtered_velocity_);
      filtered_omega_ += alpha * (odometry_.payload.angular_velocity - filtered_omega_);
      odometry_.payload.velocity = filtered_velocity_;
      odometry_.payload.angular_velocity = filtered_omega_;
    }
  }

  // Per-robot filters.
  if (filters_.empty()) {
    const NoiseConfig noise = config_.ukf_noise();
    const UkfModel model = config_.ukf_model();
    const double prior = config_.estimator.tension_prior.value_or(
        params_.payload.mass * params_.gravity / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
      filters_.emplace_back(model, noise,
                            initial_belief(odometry_.robots[k], prior, config_.estimator.tension_prior_std, noise),
                            config_.estimator.params);
      last_inputs_[k].thrust = params_.quads[k].mass * params_.gravity + prior;
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      filters_[k].predict(last_inputs_[k], dt);
      if (measure) filters_[k].update(odometry_.robots[k]);
    }
  }
  TensionSet mu_est(3 * static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    mu_est.segment<3>(3 * static_cast<Eigen::Index>(k)) = filters_[k].tension().on_payload;
    tension_stamps_[k] = t;
  }

  // Wrench estimate and admittance.
  const AllocationGeometry geom = AllocationGeometry::from_payload(odometry_.payload, params_.cables);
  const MatrixX p = build_P(geom);
  const WrenchEstimator::Result west = wrench_estimator_.estimate(mu_est, tension_stamps_, t, p);
  const Vector6 w_raw = west.wrench.stacked();
  const Vector6 w_filtered = wrench_filter_.filter(w_raw, dt);
  const AdmittanceReference ref = trajectory_.sample(local);
  AdmittanceOutput adm;
  if (config_.admittance.enabled) {
    adm = admittance_step(admittance_, w_filtered, admittance_gains_, ref, dt);
    admittance_ = adm.next;
  } else {
    adm.pose = ref.pose;
    adm.velocity = ref.velocity;
    adm.acceleration = ref.acceleration;
  }

  // Payload control and allocation.
  const PayloadControlOutput pc =
      payload_controller_.desired_wrench(odometry_.payload, to_payload_reference(adm), dt);
  const std::optional<Vector3> human =
      human_override_ ? human_override_ : human_position(config_.human_path, local);
  std::vector<Vector3> robot_estimates;
  for (const auto& f : filters_) robot_estimates.push_back(f.belief().mean.segment<3>(ukf_index::position));
  const AllocationResult alloc = allocator_.allocate(pc.wrench, geom, human.value_or(kFarAway), robot_estimates);

  // Robot controllers.
  const PayloadState& pl = odometry_.payload;
  const Matrix3 jl = params_.payload.inertia;
  const Vector3 omega_dot = jl.ldlt().solve(pc.wrench.moment - pl.angular_velocity.cross(jl * pl.angular_velocity));
  const Matrix3 omega_hat = hat(pl.angular_velocity);
  std::vector<RobotCommand> commands(n);
  LogRecord rec;
  rec.robots.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vector3& rho = params_.cables[k].attach_offset;
    const Vector3 a_c = pc.commanded_acceleration - pl.rotation * hat(rho) * omega_dot +
                        pl.rotation * omega_hat * omega_hat * rho;
    const UkfState& m = filters_[k].belief().mean;
    RobotEstimate est;
    est.rotation = euler_zyx_to_rot(EulerZYX::from_vector(m.segment<3>(ukf_index::euler)));
    est.angular_velocity = m.segment<3>(ukf_index::omega);
    est.cable_direction = m.segment<3>(ukf_index::q);
    est.cable_rate = m.segment<3>(ukf_index::q_dot);
    const RobotControlOutput out =
        robot_controllers_[k].compute(est, tension_of(alloc.mu_des, k), a_c, 0.0, dt);
    const double kf = params_.quads[k].motor_constant;
    commands[k].thrust = motor_thrust(speeds_for_thrust(out.command.thrust, kf), kf);
    commands[k].moment = out.command.moment;
    last_inputs_[k] = {commands[k].thrust, commands[k].moment};

    RobotRecord& rr = rec.robots[k];
    rr.position_estimate = m.segment<3>(ukf_index::position);
    rr.tension_estimate = m(ukf_index::tension);
    rr.tension_vector_estimate = tension_of(mu_est, k);
    rr.tension_desired = tension_of(alloc.mu_des, k);
    rr.thrust = commands[k].thrust;
    rr.moment = commands[k].moment;
    rr.saturated = out.saturated;
  }

  // Applied wrench: scripted plus unexpired operator commands.
  Wrench applied = scripted_wrench(config_.wrench_script, local);
  std::erase_if(commanded_wrenches_, [t](const TimedWrench& w) { return w.expires <= t + 1e-12; });
  for (const auto& w : commanded_wrenches_) {
    applied.force += w.wrench.force;
    applied.moment += w.wrench.moment;
  }

  // Record the state at the start of the step.
  rec.step = step_;
  rec.time = t;
  rec.payload_position = world_.payload.position;
  rec.payload_velocity = world_.payload.velocity;
  rec.payload_omega = world_.payload.angular_velocity;
  try {
    rec.payload_euler = rot_to_euler_zyx(world_.payload.rotation).vector();
  } catch (const GimbalLock&) {
    rec.payload_euler = Vector3::Constant(std::numeric_limits<double>::quiet_NaN());
  }
  rec.reference_pose = ref.pose;
  rec.desired_pose = adm.pose;
  rec.desired_velocity = adm.velocity;
  rec.applied_wrench = applied.stacked();
  rec.estimated_wrench_raw = w_raw;
  rec.estimated_wrench = w_filtered;
  rec.wrench_stale = west.stale;
  rec.quasi_static_residual =
      params_.payload.mass * (world_.payload.velocity - previous_payload_velocity_) / dt;
  previous_payload_velocity_ = world_.payload.velocity;
  rec.human = human;
  std::vector<Vector3> truth_positions;
  const std::vector<Vector3> cable_forces = cable_forces_on_quads(world_, params_);
  for (std::size_t k = 0; k < n; ++k) {
    truth_positions.push_back(world_.quads[k].position);
    rec.robots[k].position = world_.quads[k].position;
    rec.robots[k].tension_true = cable_forces[k].norm();
    rec.robots[k].tension_vector_true = -cable_forces[k];
  }
  if (human) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& x : truth_positions) d = std::min(d, (*human - x).norm());
    rec.min_human_distance = d;
  }
  rec.min_robot_distance = min_pairwise(truth_positions);
  const AllocationDiagnostics& diag = alloc.diagnostics;
  rec.allocation_objective = diag.objective;
  rec.nullspace_residual = diag.nullspace_residual;
  rec.wrench_residual = diag.wrench_residual;
  rec.human_slack = diag.slacks.human;
  rec.robot_slack = diag.slacks.robot;
  rec.solver_status = diag.solver_status ? to_string(*diag.solver_status) : "";
  rec.solver_iterations = diag.solver_iterations;
  rec.allocation_degenerate = diag.degenerate;
  rec.allocation_infeasible = diag.infeasible;
  rec.safety_mode = to_string(allocator_.params().mode);

  // Advance the plant.
  world_.external = applied;
  try {
    for (int s = 0; s < substeps_; ++s) world_ = step_rk4(world_, commands, params_, config_.rates.sim_dt);
  } catch (const NumericalBlowup& e) {
    throw NumericalBlowup("control step " + std::to_string(step_) + ": " + e.what());
  }
  ++step_;
  world_.time = static_cast<double>(step_) * dt;
  return rec;
}

RunLog run_scenario(const ScenarioConfig& config, const std::vector<CommandRecord>& inject) {
  Simulation sim(config);
  RunLog log;
  log.header = make_log_header(config);
  std::size_t next = 0;
  while (!sim.finished()) {
    while (next < inject.size() && inject[next].step <= sim.step_index()) {
      sim.submit(command_from_json(inject[next].command));
      ++next;
    }
    log.records.push_back(sim.step());
  }
  log.commands = sim.applied_commands();
  return log;
}

RunLog replay_log(const RunLog& log) {
  if (!log.header.contains("config")) throw ConfigError("log header has no config");
  const ScenarioConfig config = config_from_json(log.header.at("config"));
  return run_scenario(config, log.commands);
}

}  // namespace cstrans
