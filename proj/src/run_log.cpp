#include "cstrans/run_log.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cstrans {

using nlohmann::json;

namespace {

template <int N>
Eigen::Matrix<double, N, 1> vec_at(const json& j, const char* key) {
  return from_json_vec(j.at(key), N, key);
}

json robot_to_json(const RobotRecord& r) {
  return {{"position", to_json_vec(r.position)},
          {"position_estimate", to_json_vec(r.position_estimate)},
          {"tension_true", r.tension_true},
          {"tension_estimate", r.tension_estimate},
          {"tension_vector_true", to_json_vec(r.tension_vector_true)},
          {"tension_vector_estimate", to_json_vec(r.tension_vector_estimate)},
          {"tension_desired", to_json_vec(r.tension_desired)},
          {"thrust", r.thrust},
          {"moment", to_json_vec(r.moment)},
          {"saturated", r.saturated}};
}

RobotRecord robot_from_json(const json& j) {
  RobotRecord r;
  r.position = vec_at<3>(j, "position");
  r.position_estimate = vec_at<3>(j, "position_estimate");
  r.tension_true = j.at("tension_true").get<double>();
  r.tension_estimate = j.at("tension_estimate").get<double>();
  r.tension_vector_true = vec_at<3>(j, "tension_vector_true");
  r.tension_vector_estimate = vec_at<3>(j, "tension_vector_estimate");
  r.tension_desired = vec_at<3>(j, "tension_desired");
  r.thrust = j.at("thrust").get<double>();
  r.moment = vec_at<3>(j, "moment");
  r.saturated = j.at("saturated").get<bool>();
  return r;
}

}  // namespace

json record_to_json(const LogRecord& r) {
  json robots = json::array();
  for (const auto& rr : r.robots) robots.push_back(robot_to_json(rr));
  json j = {{"type", "record"},
            {"step", r.step},
            {"time", r.time},
            {"payload_position", to_json_vec(r.payload_position)},
            {"payload_velocity", to_json_vec(r.payload_velocity)},
            {"payload_euler", to_json_vec(r.payload_euler)},
            {"payload_omega", to_json_vec(r.payload_omega)},
            {"reference_pose", to_json_vec(r.reference_pose)},
            {"desired_pose", to_json_vec(r.desired_pose)},
            {"desired_velocity", to_json_vec(r.desired_velocity)},
            {"applied_wrench", to_json_vec(r.applied_wrench)},
            {"estimated_wrench_raw", to_json_vec(r.estimated_wrench_raw)},
            {"estimated_wrench", to_json_vec(r.estimated_wrench)},
            {"quasi_static_residual", to_json_vec(r.quasi_static_residual)},
            {"wrench_stale", r.wrench_stale},
            {"human", r.human ? to_json_vec(*r.human) : json(nullptr)},
            {"min_human_distance", r.min_human_distance ? json(*r.min_human_distance) : json(nullptr)},
            {"min_robot_distance", r.min_robot_distance},
            {"allocation_objective", r.allocation_objective},
            {"nullspace_residual", r.nullspace_residual},
            {"wrench_residual", r.wrench_residual},
            {"human_slack", r.human_slack},
            {"robot_slack", r.robot_slack},
            {"solver_status", r.solver_status},
            {"solver_iterations", r.solver_iterations},
            {"allocation_degenerate", r.allocation_degenerate},
            {"allocation_infeasible", r.allocation_infeasible},
            {"safety_mode", r.safety_mode},
            {"robots", robots}};
  return j;
}

LogRecord record_from_json(const json& j) {
  LogRecord r;
  r.step = j.at("step").get<long>();
  r.time = j.at("time").get<double>();
  r.payload_position = vec_at<3>(j, "payload_position");
  r.payload_velocity = vec_at<3>(j, "payload_velocity");
  r.payload_euler = vec_at<3>(j, "payload_euler");
  r.payload_omega = vec_at<3>(j, "payload_omega");
  r.reference_pose = vec_at<6>(j, "reference_pose");
  r.desired_pose = vec_at<6>(j, "desired_pose");
  r.desired_velocity = vec_at<6>(j, "desired_velocity");
  r.applied_wrench = vec_at<6>(j, "applied_wrench");
  r.estimated_wrench_raw = vec_at<6>(j, "estimated_wrench_raw");
  r.estimated_wrench = vec_at<6>(j, "estimated_wrench");
  r.quasi_static_residual = vec_at<3>(j, "quasi_static_residual");
  r.wrench_stale = j.at("wrench_stale").get<bool>();
  if (!j.at("human").is_null()) r.human = vec_at<3>(j, "human");
  if (!j.at("min_human_distance").is_null()) r.min_human_distance = j.at("min_human_distance").get<double>();
  r.min_robot_distance = j.at("min_robot_distance").get<double>();
  r.allocation_objective = j.at("allocation_objective").get<double>();
  r.nullspace_residual = j.at("nullspace_residual").get<double>();
  r.wrench_residual = j.at("wrench_residual").get<double>();
  r.human_slack = j.at("human_slack").is_null() ? 0.0 : j.at("human_slack").get<double>();
  r.robot_slack = j.at("robot_slack").is_null() ? 0.0 : j.at("robot_slack").get<double>();
  r.solver_status = j.at("solver_status").get<std::string>();
  r.solver_iterations = j.at("solver_iterations").get<int>();
  r.allocation_degenerate = j.at("allocation_degenerate").get<bool>();
  r.allocation_infeasible = j.at("allocation_infeasible").get<bool>();
  r.safety_mode = j.at("safety_mode").get<std::string>();
  for (const auto& rr : j.at("robots")) r.robots.push_back(robot_from_json(rr));
  return r;
}

json make_log_header(const ScenarioConfig& config) {
  return {{"type", "header"},
          {"schema", kLogSchema},
          {"version", kLogVersion},
          {"seed", config.seed},
          {"config", config_to_json(config)}};
}

void write_jsonl(const RunLog& log, std::ostream& out) {
  out << log.header.dump() << '\n';
  std::size_t c = 0;
  for (const auto& r : log.records) {
    while (c < log.commands.size() && log.commands[c].step <= r.step) {
      const CommandRecord& cr = log.commands[c++];
      out << json{{"type", "command"}, {"step", cr.step}, {"time", cr.time}, {"command", cr.command}}.dump()
          << '\n';
    }
    out << record_to_json(r).dump() << '\n';
  }
  for (; c < log.commands.size(); ++c) {
    const CommandRecord& cr = log.commands[c];
    out << json{{"type", "command"}, {"step", cr.step}, {"time", cr.time}, {"command", cr.command}}.dump()
        << '\n';
  }
}

void write_jsonl(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open log file '" + path + "' for writing");
  write_jsonl(log, out);
}

RunLog read_jsonl(std::istream& in) {
  RunLog log;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (j.at("schema") != kLogSchema || j.at("version") != kLogVersion) {
          throw ConfigError("unsupported log schema or version");
        }
        log.header = j;
        have_header = true;
      } else if (type == "record") {
        log.records.push_back(record_from_json(j));
      } else if (type == "command") {
        log.commands.push_back({j.at("step").get<long>(), j.at("time").get<double>(), j.at("command")});
      } else {
        throw ConfigError("unknown line type '" + type + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("log line " + std::to_string(lineno) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ConfigError("log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw ConfigError("log has no header line");
  return log;
}

RunLog read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open log file '" + path + "'");
  return read_jsonl(in);
}

void write_csv(const RunLog& log, std::ostream& out) {
  const std::size_t n = log.records.empty() ? 0 : log.records.front().robots.size();
  out << "step,time,x,y,z,vx,vy,vz,yaw,pitch,roll,"
         "ref_x,ref_y,ref_z,ref_roll,ref_pitch,ref_yaw,"
         "des_x,des_y,des_z,des_roll,des_pitch,des_yaw,"
         "fx,fy,fz,mx,my,mz,est_fx,est_fy,est_fz,est_mx,est_my,est_mz,"
         "min_human_distance,min_robot_distance,nullspace_residual,solver_status";
  for (std::size_t k = 0; k < n; ++k) {
    out << ",r" << k << "_x,r" << k << "_y,r" << k << "_z,r" << k << "_tension_true,r" << k
        << "_tension_est,r" << k << "_thrust";
  }
  out << '\n';
  out << std::setprecision(10);
  auto vec = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << v(i);
  };
  for (const auto& r : log.records) {
    out << r.step << ',' << r.time;
    vec(r.payload_position);
    vec(r.payload_velocity);
    vec(r.payload_euler);
    vec(r.reference_pose);
    vec(r.desired_pose);
    vec(r.applied_wrench);
    vec(r.estimated_wrench);
    out << ',';
    if (r.min_human_distance) out << *r.min_human_distance;
    out << ',' << r.min_robot_distance << ',' << r.nullspace_residual << ',' << r.solver_status;
    for (const auto& rr : r.robots) {
      vec(rr.position);
      out << ',' << rr.tension_true << ',' << rr.tension_estimate << ',' << rr.thrust;
    }
    out << '\n';
  }
}

void write_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open csv file '" + path + "' for writing");
  write_csv(log, out);
}

}  // namespace cstrans
