#include "cstrans/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace cstrans {

using nlohmann::json;

json to_json_vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd from_json_vec(const json& j, Eigen::Index size, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw ConfigError(what + ": expected an array of " + std::to_string(size) + " numbers");
  }
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw ConfigError(what + ": element " + std::to_string(i) + " is not a number");
    v(i) = e.get<double>();
  }
  return v;
}

namespace {

/// Object reader that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) { seen_.insert(key); return j_.at(key); }
  std::string sub(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(sub(key) + ": expected a number");
    out = v.get<double>();
  }
  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key) + ": expected an integer");
    out = v.get<int>();
  }
  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(sub(key) + ": expected a boolean");
    out = v.get<bool>();
  }
  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(sub(key) + ": expected a string");
    out = v.get<std::string>();
  }
  template <int N>
  void vec(const std::string& key, Eigen::Matrix<double, N, 1>& out) {
    if (!has(key)) return;
    out = from_json_vec(j_.at(key), N, sub(key));
  }
  void doubles(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(sub(key) + ": expected an array");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(sub(key) + ": expected numbers");
      out.push_back(e.get<double>());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + sub(it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_rates(Section s, RateConfig& r) {
  s.number("sim_dt", r.sim_dt);
  s.number("control_dt", r.control_dt);
  s.integer("measurement_divisor", r.measurement_divisor);
  s.finish();
}

void read_team(Section s, TeamConfig& t) {
  s.integer("n", t.n);
  s.number("attach_radius", t.attach_radius);
  if (s.has("attach_offsets")) {
    const json& a = s.at("attach_offsets");
    if (!a.is_array()) throw ConfigError(s.sub("attach_offsets") + ": expected an array");
    t.attach_offsets.clear();
    for (const auto& e : a) t.attach_offsets.push_back(from_json_vec(e, 3, s.sub("attach_offsets")));
  }
  s.number("payload_mass", t.payload_mass);
  s.vec<3>("payload_inertia", t.payload_inertia);
  s.number("quad_mass", t.quad_mass);
  s.vec<3>("quad_inertia", t.quad_inertia);
  s.number("motor_constant", t.motor_constant);
  s.number("cable_length", t.cable_length);
  s.number("cable_stiffness", t.cable_stiffness);
  s.number("cable_damping", t.cable_damping);
  s.finish();
}

void read_initial(Section s, InitialConfig& c) {
  s.vec<3>("payload_position", c.payload_position);
  s.number("payload_yaw", c.payload_yaw);
  s.finish();
}

void read_payload_gains(Section s, PayloadGains& g) {
  s.vec<3>("kp", g.kp);
  s.vec<3>("kd", g.kd);
  s.vec<3>("ki", g.ki);
  s.vec<3>("k_rot", g.k_rot);
  s.vec<3>("k_omega", g.k_omega);
  s.number("integral_clamp", g.integral_clamp);
  s.finish();
}

void read_robot(Section s, RobotControlConfig& r) {
  s.vec<3>("k_q", r.gains.k_q);
  s.vec<3>("k_omega", r.gains.k_omega);
  s.vec<3>("k_R", r.gains.k_R);
  s.vec<3>("k_Omega", r.gains.k_Omega);
  s.number("f_max", r.f_max);
  s.number("filter_hz", r.filter_hz);
  s.finish();
}

void read_admittance(Section s, AdmittanceConfig& a) {
  s.boolean("enabled", a.enabled);
  s.vec<6>("mass", a.gains.mass);
  s.vec<6>("damping", a.gains.damping);
  s.vec<6>("stiffness", a.gains.stiffness);
  s.number("wrench_filter_hz", a.wrench_filter_hz);
  s.finish();
}

RotationUpdate rotation_update_from_string(const std::string& s) {
  if (s == "spatial") return RotationUpdate::Spatial;
  if (s == "body") return RotationUpdate::Body;
  throw ConfigError("unknown rotation_update '" + s + "'");
}

const char* to_string(RotationUpdate r) { return r == RotationUpdate::Spatial ? "spatial" : "body"; }

void read_estimator(Section s, EstimatorConfig& e) {
  s.vec<kUkfNoiseDim>("process_std", e.process_std);
  if (s.has("measurement_std")) {
    e.measurement_std = from_json_vec(s.at("measurement_std"), kUkfMeasDim, s.sub("measurement_std"));
  }
  if (s.has("tension_prior")) {
    double v = 0.0;
    s.number("tension_prior", v);
    e.tension_prior = v;
  }
  s.number("tension_prior_std", e.tension_prior_std);
  s.number("payload_rate_filter_hz", e.payload_rate_filter_hz);
  std::string rot;
  s.string("rotation_update", rot);
  if (!rot.empty()) e.rotation_update = rotation_update_from_string(rot);
  s.number("alpha", e.params.alpha);
  s.number("beta", e.params.beta);
  s.number("kappa", e.params.kappa);
  s.finish();
}

void read_noise(Section s, MeasurementNoise& n) {
  s.number("position", n.position);
  s.number("velocity", n.velocity);
  s.number("angle", n.angle);
  s.number("angular_rate", n.angular_rate);
  s.number("cable_direction", n.cable_direction);
  s.number("cable_rate", n.cable_rate);
  s.number("payload_position", n.payload_position);
  s.number("payload_velocity", n.payload_velocity);
  s.number("payload_angle", n.payload_angle);
  s.number("payload_angular_rate", n.payload_angular_rate);
  s.finish();
}

void read_solver(Section s, SolverSettings& o) {
  s.integer("max_outer_iterations", o.max_outer_iterations);
  s.integer("max_inner_iterations", o.max_inner_iterations);
  s.number("feasibility_tolerance", o.feasibility_tolerance);
  s.number("stationarity_tolerance", o.stationarity_tolerance);
  s.number("initial_penalty", o.initial_penalty);
  s.number("penalty_growth", o.penalty_growth);
  s.number("max_penalty", o.max_penalty);
  s.finish();
}

void read_safety(Section s, SafetyParams& p) {
  std::string mode;
  s.string("mode", mode);
  if (!mode.empty()) p.mode = safety_mode_from_string(mode);
  s.number("a", p.a);
  s.number("b", p.b);
  s.number("human_clearance", p.human_clearance);
  s.number("robot_clearance", p.robot_clearance);
  s.number("max_tension", p.max_tension);
  if (s.has("solver")) read_solver(Section(s.at("solver"), s.sub("solver")), p.solver);
  s.finish();
}

void read_trajectory(Section s, TrajectorySpec& t) {
  std::string type = "hover";
  s.string("type", type);
  if (type == "hover") {
    t.kind = TrajectorySpec::Kind::Hover;
    s.vec<3>("position", t.hover_position);
    s.number("yaw", t.hover_yaw);
  } else if (type == "waypoints") {
    t.kind = TrajectorySpec::Kind::Waypoints;
    if (!s.has("points") || !s.at("points").is_array()) {
      throw ConfigError(s.sub("points") + ": expected an array");
    }
    t.waypoints.clear();
    for (const auto& p : s.at("points")) {
      Section w(p, s.sub("points[]"));
      WaypointSpec wp;
      w.number("t", wp.t);
      w.vec<3>("position", wp.position);
      w.number("yaw", wp.yaw);
      w.finish();
      t.waypoints.push_back(wp);
    }
  } else if (type == "polynomial") {
    t.kind = TrajectorySpec::Kind::Polynomial;
    s.number("start_time", t.polynomial_start);
    if (!s.has("segments") || !s.at("segments").is_array()) {
      throw ConfigError(s.sub("segments") + ": expected an array");
    }
    t.segments.clear();
    for (const auto& p : s.at("segments")) {
      Section w(p, s.sub("segments[]"));
      PolynomialSegment seg;
      w.number("duration", seg.duration);
      w.doubles("x", seg.x);
      w.doubles("y", seg.y);
      w.doubles("z", seg.z);
      w.doubles("yaw", seg.yaw);
      w.finish();
      t.segments.push_back(seg);
    }
  } else {
    throw ConfigError(s.sub("type") + ": unknown trajectory type '" + type + "'");
  }
  s.finish();
}

void read_wrench_script(const json& j, const std::string& path, std::vector<WrenchEvent>& out) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array");
  out.clear();
  for (const auto& e : j) {
    Section s(e, path + "[]");
    WrenchEvent w;
    s.number("start", w.start);
    s.number("duration", w.duration);
    s.vec<3>("force", w.force);
    s.vec<3>("moment", w.moment);
    s.finish();
    out.push_back(w);
  }
}

void read_human(Section s, std::vector<HumanPathPoint>& out) {
  out.clear();
  if (s.has("path")) {
    const json& a = s.at("path");
    if (!a.is_array()) throw ConfigError(s.sub("path") + ": expected an array");
    for (const auto& e : a) {
      Section p(e, s.sub("path[]"));
      HumanPathPoint h;
      p.number("t", h.t);
      p.vec<3>("position", h.position);
      p.finish();
      out.push_back(h);
    }
  }
  s.finish();
}

void read_service(Section s, ServiceConfig& c) {
  s.string("host", c.host);
  s.integer("port", c.port);
  s.integer("frame_stride", c.frame_stride);
  s.integer("client_queue", c.client_queue);
  s.number("max_force", c.max_force);
  s.number("max_moment", c.max_moment);
  s.boolean("realtime", c.realtime);
  s.finish();
}

void read_output(Section s, OutputConfig& o) {
  s.string("log", o.log);
  s.string("csv", o.csv);
  s.finish();
}

json vec_json(const Eigen::VectorXd& v) { return to_json_vec(v); }

}  // namespace

int RateConfig::substeps() const {
  if (!(sim_dt > 0.0) || !(control_dt > 0.0)) throw ConfigError("rates: dt values must be positive");
  const double ratio = control_dt / sim_dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw ConfigError("rates: control_dt must be an integer multiple of sim_dt");
  }
  return static_cast<int>(rounded);
}

MeasurementNoise ScenarioConfig::default_sensor_noise() {
  const double deg = std::numbers::pi / 180.0;
  MeasurementNoise n;
  n.position = 1e-3;
  n.velocity = 0.01;
  n.angle = 0.2 * deg;
  n.angular_rate = 0.01;
  n.cable_direction = 2e-3;
  n.cable_rate = 0.015;
  n.payload_position = 1e-3;
  n.payload_velocity = 0.01;
  n.payload_angle = 0.2 * deg;
  n.payload_angular_rate = 0.01;
  return n;
}

std::vector<Vector3> ScenarioConfig::attach_offsets() const {
  if (!team.attach_offsets.empty()) return team.attach_offsets;
  std::vector<Vector3> out;
  for (int k = 0; k < team.n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / team.n;
    out.emplace_back(team.attach_radius * std::cos(a), team.attach_radius * std::sin(a), 0.0);
  }
  return out;
}

SystemParams ScenarioConfig::system_params() const {
  SystemParams p;
  p.payload.mass = team.payload_mass;
  p.payload.inertia = team.payload_inertia.asDiagonal();
  for (const auto& rho : attach_offsets()) {
    BodyParams q;
    q.mass = team.quad_mass;
    q.inertia = team.quad_inertia.asDiagonal();
    q.motor_constant = team.motor_constant;
    p.quads.push_back(q);
    CableParams c;
    c.length = team.cable_length;
    c.attach_offset = rho;
    c.stiffness = team.cable_stiffness;
    c.damping = team.cable_damping;
    p.cables.push_back(c);
  }
  return p;
}

NoiseConfig ScenarioConfig::ukf_noise() const {
  NoiseConfig n;
  n.process_std = estimator.process_std;
  if (estimator.measurement_std) {
    n.measurement_std = *estimator.measurement_std;
  } else {
    const MeasurementNoise& s = sensor_noise;
    auto f = [](double v) { return std::max(v, 1e-6); };
    n.measurement_std << Vector3::Constant(f(s.position)), Vector3::Constant(f(s.velocity)),
        Vector3::Constant(f(s.angle)), Vector3::Constant(f(s.angular_rate)),
        Vector3::Constant(f(s.cable_direction)), Vector3::Constant(f(s.cable_rate));
  }
  return n;
}

UkfModel ScenarioConfig::ukf_model() const {
  UkfModel m;
  m.mass = team.quad_mass;
  m.inertia = team.quad_inertia.asDiagonal();
  m.cable_length = team.cable_length;
  m.rotation_update = estimator.rotation_update;
  return m;
}

void ScenarioConfig::validate() const {
  if (team.n < 3) throw ConfigError("team.n must be at least 3");
  if (!team.attach_offsets.empty() && static_cast<int>(team.attach_offsets.size()) != team.n) {
    throw ConfigError("team.attach_offsets must have n entries");
  }
  if (!(team.payload_mass > 0.0) || !(team.quad_mass > 0.0) || !(team.cable_length > 0.0) ||
      !(team.motor_constant > 0.0) || !(team.cable_stiffness > 0.0) || team.cable_damping < 0.0 ||
      (team.payload_inertia.array() <= 0.0).any() || (team.quad_inertia.array() <= 0.0).any()) {
    throw ConfigError("team: masses, inertias, cable and motor parameters must be positive");
  }
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  rates.substeps();
  if (rates.sim_dt > 0.01) throw ConfigError("rates.sim_dt must not exceed 0.01 s");
  if (rates.control_dt > 0.05) throw ConfigError("rates.control_dt must not exceed 0.05 s");
  if (rates.measurement_divisor < 1) throw ConfigError("rates.measurement_divisor must be >= 1");
  if (!(robot.f_max > 0.0) || !(robot.filter_hz > 0.0)) {
    throw ConfigError("robot_controller: f_max and filter_hz must be positive");
  }
  for (const Vector3* g : {&robot.gains.k_q, &robot.gains.k_omega, &robot.gains.k_R, &robot.gains.k_Omega}) {
    if ((g->array() < 0.0).any()) throw ConfigError("robot_controller: gains must be >= 0");
  }
  if (!(payload_gains.integral_clamp > 0.0)) throw ConfigError("payload_controller.integral_clamp must be positive");
  admittance.gains.validate();
  ukf_noise().validate();
  if (!(estimator.tension_prior_std > 0.0)) throw ConfigError("estimator.tension_prior_std must be positive");
  if (!std::isfinite(estimator.payload_rate_filter_hz)) throw ConfigError("estimator.payload_rate_filter_hz must be finite");
  if (!(estimator.params.alpha > 0.0)) throw ConfigError("estimator.alpha must be positive");
  safety.validate();
  for (const auto& w : wrench_script) {
    if (w.duration < 0.0) throw ConfigError("wrench_script: negative duration");
  }
  for (std::size_t i = 1; i < human_path.size(); ++i) {
    if (!(human_path[i].t > human_path[i - 1].t)) throw ConfigError("human.path times must increase");
  }
  if (trajectory.kind == TrajectorySpec::Kind::Waypoints) {
    if (trajectory.waypoints.empty()) throw ConfigError("trajectory.points must not be empty");
    for (std::size_t i = 1; i < trajectory.waypoints.size(); ++i) {
      if (!(trajectory.waypoints[i].t > trajectory.waypoints[i - 1].t)) {
        throw ConfigError("trajectory.points times must increase");
      }
    }
  }
  if (trajectory.kind == TrajectorySpec::Kind::Polynomial) {
    if (trajectory.segments.empty()) throw ConfigError("trajectory.segments must not be empty");
    for (const auto& s : trajectory.segments) {
      if (!(s.duration > 0.0)) throw ConfigError("trajectory.segments: duration must be positive");
    }
  }
  if (service.port < 0 || service.port > 65535) throw ConfigError("service.port out of range");
  if (service.frame_stride < 1 || service.client_queue < 1) {
    throw ConfigError("service.frame_stride and client_queue must be >= 1");
  }
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  Section s(j, "config");
  if (s.has("seed")) {
    const json& v = s.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("config.seed: expected a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  s.number("duration", c.duration);
  if (s.has("rates")) read_rates(Section(s.at("rates"), "rates"), c.rates);
  if (s.has("team")) read_team(Section(s.at("team"), "team"), c.team);
  if (s.has("initial")) read_initial(Section(s.at("initial"), "initial"), c.initial);
  if (s.has("payload_controller")) {
    read_payload_gains(Section(s.at("payload_controller"), "payload_controller"), c.payload_gains);
  }
  if (s.has("robot_controller")) read_robot(Section(s.at("robot_controller"), "robot_controller"), c.robot);
  if (s.has("admittance")) read_admittance(Section(s.at("admittance"), "admittance"), c.admittance);
  if (s.has("estimator")) read_estimator(Section(s.at("estimator"), "estimator"), c.estimator);
  if (s.has("sensor_noise")) read_noise(Section(s.at("sensor_noise"), "sensor_noise"), c.sensor_noise);
  if (s.has("safety")) read_safety(Section(s.at("safety"), "safety"), c.safety);
  if (s.has("trajectory")) read_trajectory(Section(s.at("trajectory"), "trajectory"), c.trajectory);
  if (s.has("wrench_script")) read_wrench_script(s.at("wrench_script"), "wrench_script", c.wrench_script);
  if (s.has("human")) read_human(Section(s.at("human"), "human"), c.human_path);
  if (s.has("service")) read_service(Section(s.at("service"), "service"), c.service);
  if (s.has("output")) read_output(Section(s.at("output"), "output"), c.output);
  s.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return config_from_json(j);
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["duration"] = c.duration;
  j["rates"] = {{"sim_dt", c.rates.sim_dt},
                {"control_dt", c.rates.control_dt},
                {"measurement_divisor", c.rates.measurement_divisor}};
  json team = {{"n", c.team.n},
               {"attach_radius", c.team.attach_radius},
               {"payload_mass", c.team.payload_mass},
               {"payload_inertia", vec_json(c.team.payload_inertia)},
               {"quad_mass", c.team.quad_mass},
               {"quad_inertia", vec_json(c.team.quad_inertia)},
               {"motor_constant", c.team.motor_constant},
               {"cable_length", c.team.cable_length},
               {"cable_stiffness", c.team.cable_stiffness},
               {"cable_damping", c.team.cable_damping}};
  if (!c.team.attach_offsets.empty()) {
    json a = json::array();
    for (const auto& r : c.team.attach_offsets) a.push_back(vec_json(r));
    team["attach_offsets"] = a;
  }
  j["team"] = team;
  j["initial"] = {{"payload_position", vec_json(c.initial.payload_position)},
                  {"payload_yaw", c.initial.payload_yaw}};
  const PayloadGains& pg = c.payload_gains;
  j["payload_controller"] = {{"kp", vec_json(pg.kp)},           {"kd", vec_json(pg.kd)},
                             {"ki", vec_json(pg.ki)},           {"k_rot", vec_json(pg.k_rot)},
                             {"k_omega", vec_json(pg.k_omega)}, {"integral_clamp", pg.integral_clamp}};
  j["robot_controller"] = {{"k_q", vec_json(c.robot.gains.k_q)},
                           {"k_omega", vec_json(c.robot.gains.k_omega)},
                           {"k_R", vec_json(c.robot.gains.k_R)},
                           {"k_Omega", vec_json(c.robot.gains.k_Omega)},
                           {"f_max", c.robot.f_max},
                           {"filter_hz", c.robot.filter_hz}};
  j["admittance"] = {{"enabled", c.admittance.enabled},
                     {"mass", vec_json(c.admittance.gains.mass)},
                     {"damping", vec_json(c.admittance.gains.damping)},
                     {"stiffness", vec_json(c.admittance.gains.stiffness)},
                     {"wrench_filter_hz", c.admittance.wrench_filter_hz}};
  json est = {{"process_std", vec_json(c.estimator.process_std)},
              {"tension_prior_std", c.estimator.tension_prior_std},
              {"payload_rate_filter_hz", c.estimator.payload_rate_filter_hz},
              {"rotation_update", to_string(c.estimator.rotation_update)},
              {"alpha", c.estimator.params.alpha},
              {"beta", c.estimator.params.beta},
              {"kappa", c.estimator.params.kappa}};
  if (c.estimator.measurement_std) est["measurement_std"] = vec_json(*c.estimator.measurement_std);
  if (c.estimator.tension_prior) est["tension_prior"] = *c.estimator.tension_prior;
  j["estimator"] = est;
  const MeasurementNoise& n = c.sensor_noise;
  j["sensor_noise"] = {{"position", n.position},
                       {"velocity", n.velocity},
                       {"angle", n.angle},
                       {"angular_rate", n.angular_rate},
                       {"cable_direction", n.cable_direction},
                       {"cable_rate", n.cable_rate},
                       {"payload_position", n.payload_position},
                       {"payload_velocity", n.payload_velocity},
                       {"payload_angle", n.payload_angle},
                       {"payload_angular_rate", n.payload_angular_rate}};
  const SolverSettings& so = c.safety.solver;
  j["safety"] = {{"mode", to_string(c.safety.mode)},
                 {"a", c.safety.a},
                 {"b", c.safety.b},
                 {"human_clearance", c.safety.human_clearance},
                 {"robot_clearance", c.safety.robot_clearance},
                 {"max_tension", c.safety.max_tension},
                 {"solver",
                  {{"max_outer_iterations", so.max_outer_iterations},
                   {"max_inner_iterations", so.max_inner_iterations},
                   {"feasibility_tolerance", so.feasibility_tolerance},
                   {"stationarity_tolerance", so.stationarity_tolerance},
                   {"initial_penalty", so.initial_penalty},
                   {"penalty_growth", so.penalty_growth},
                   {"max_penalty", so.max_penalty}}}};
  const TrajectorySpec& t = c.trajectory;
  switch (t.kind) {
    case TrajectorySpec::Kind::Hover:
      j["trajectory"] = {{"type", "hover"}, {"position", vec_json(t.hover_position)}, {"yaw", t.hover_yaw}};
      break;
    case TrajectorySpec::Kind::Waypoints: {
      json pts = json::array();
      for (const auto& w : t.waypoints) {
        pts.push_back({{"t", w.t}, {"position", vec_json(w.position)}, {"yaw", w.yaw}});
      }
      j["trajectory"] = {{"type", "waypoints"}, {"points", pts}};
      break;
    }
    case TrajectorySpec::Kind::Polynomial: {
      json segs = json::array();
      for (const auto& s : t.segments) {
        segs.push_back({{"duration", s.duration}, {"x", s.x}, {"y", s.y}, {"z", s.z}, {"yaw", s.yaw}});
      }
      j["trajectory"] = {{"type", "polynomial"}, {"start_time", t.polynomial_start}, {"segments", segs}};
      break;
    }
  }
  json ws = json::array();
  for (const auto& w : c.wrench_script) {
    ws.push_back({{"start", w.start},
                  {"duration", w.duration},
                  {"force", vec_json(w.force)},
                  {"moment", vec_json(w.moment)}});
  }
  j["wrench_script"] = ws;
  json path = json::array();
  for (const auto& h : c.human_path) path.push_back({{"t", h.t}, {"position", vec_json(h.position)}});
  j["human"] = {{"path", path}};
  j["service"] = {{"host", c.service.host},
                  {"port", c.service.port},
                  {"frame_stride", c.service.frame_stride},
                  {"client_queue", c.service.client_queue},
                  {"max_force", c.service.max_force},
                  {"max_moment", c.service.max_moment},
                  {"realtime", c.service.realtime}};
  j["output"] = {{"log", c.output.log}, {"csv", c.output.csv}};
  return j;
}

}  // namespace cstrans
