#include "cstrans/messages.hpp"

#include <cmath>
#include <set>

namespace cstrans {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw MalformedMessage(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw MalformedMessage(std::string("field '") + key + "' is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw MalformedMessage(std::string("field '") + key + "' is not finite");
  return d;
}

template <int N>
Eigen::Matrix<double, N, 1> vector(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw MalformedMessage(std::string("missing field '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != N) {
    throw MalformedMessage(std::string("field '") + key + "' must be an array of " + std::to_string(N));
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    const json& e = a[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw MalformedMessage(std::string("field '") + key + "' has a non-number");
    v(i) = e.get<double>();
    if (!std::isfinite(v(i))) throw MalformedMessage(std::string("field '") + key + "' is not finite");
  }
  return v;
}

void only_keys(const json& j, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw MalformedMessage("expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw MalformedMessage("unexpected field '" + it.key() + "'");
  }
}

json envelope(const char* type) {
  return {{"schema", kWsSchema}, {"version", kWsVersion}, {"type", type}};
}

json parse_envelope(std::string_view text, const char* expected_type) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw MalformedMessage(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw MalformedMessage("message is not an object");
  if (!j.contains("schema") || !j.at("schema").is_string() || j.at("schema").get<std::string>() != kWsSchema) {
    throw MalformedMessage("missing or unknown schema");
  }
  if (!j.contains("version") || !j.at("version").is_number_integer()) {
    throw MalformedMessage("missing or non-integer version");
  }
  if (j.at("version").get<long long>() != kWsVersion) {
    throw SchemaVersionMismatch("unsupported schema version " + j.at("version").dump());
  }
  if (!j.contains("type") || !j.at("type").is_string() || j.at("type").get<std::string>() != expected_type) {
    throw MalformedMessage(std::string("expected message type '") + expected_type + "'");
  }
  return j;
}

std::optional<long> optional_id(const json& j) {
  if (!j.contains("id") || j.at("id").is_null()) return std::nullopt;
  if (!j.at("id").is_number_integer()) throw MalformedMessage("field 'id' must be an integer");
  return j.at("id").get<long>();
}

json id_json(std::optional<long> id) { return id ? json(*id) : json(nullptr); }

}  // namespace

const char* command_name(const Command& c) {
  struct V {
    const char* operator()(const ApplyWrench&) const { return "apply_wrench"; }
    const char* operator()(const SetHumanPosition&) const { return "set_human_position"; }
    const char* operator()(const SetAdmittanceGains&) const { return "set_admittance_gains"; }
    const char* operator()(const SetSafetyMode&) const { return "set_safety_mode"; }
    const char* operator()(const ResetCommand&) const { return "reset"; }
  };
  return std::visit(V{}, c);
}

void validate_command(const Command& c, const CommandBounds& b) {
  if (const auto* w = std::get_if<ApplyWrench>(&c)) {
    if (!w->wrench.force.allFinite() || !w->wrench.moment.allFinite() || !std::isfinite(w->duration)) {
      throw MalformedMessage("apply_wrench: values must be finite");
    }
    if (w->wrench.force.norm() > b.max_force) throw MalformedMessage("apply_wrench: force above the bound");
    if (w->wrench.moment.norm() > b.max_moment) throw MalformedMessage("apply_wrench: moment above the bound");
    if (!(w->duration > 0.0) || w->duration > b.max_duration) {
      throw MalformedMessage("apply_wrench: duration out of range");
    }
  } else if (const auto* h = std::get_if<SetHumanPosition>(&c)) {
    if (!h->position.allFinite() || h->position.norm() > 1e3) {
      throw MalformedMessage("set_human_position: position out of range");
    }
  } else if (const auto* g = std::get_if<SetAdmittanceGains>(&c)) {
    try {
      g->gains.validate();
    } catch (const ConfigError& e) {
      throw MalformedMessage(std::string("set_admittance_gains: ") + e.what());
    }
  } else if (const auto* s = std::get_if<SetSafetyMode>(&c)) {
    if (!(s->human_clearance > 0.0) || !(s->robot_clearance > 0.0) || !std::isfinite(s->human_clearance) ||
        !std::isfinite(s->robot_clearance)) {
      throw MalformedMessage("set_safety_mode: clearances must be positive");
    }
  }
}

json command_to_json(const Command& c) {
  struct V {
    json operator()(const ApplyWrench& w) const {
      return {{"kind", "apply_wrench"},
              {"force", to_json_vec(w.wrench.force)},
              {"moment", to_json_vec(w.wrench.moment)},
              {"duration", w.duration}};
    }
    json operator()(const SetHumanPosition& h) const {
      return {{"kind", "set_human_position"}, {"position", to_json_vec(h.position)}};
    }
    json operator()(const SetAdmittanceGains& g) const {
      return {{"kind", "set_admittance_gains"},
              {"mass", to_json_vec(g.gains.mass)},
              {"damping", to_json_vec(g.gains.damping)},
              {"stiffness", to_json_vec(g.gains.stiffness)}};
    }
    json operator()(const SetSafetyMode& s) const {
      return {{"kind", "set_safety_mode"},
              {"mode", to_string(s.mode)},
              {"human_clearance", s.human_clearance},
              {"robot_clearance", s.robot_clearance}};
    }
    json operator()(const ResetCommand& r) const { return {{"kind", "reset"}, {"seed", r.seed}}; }
  };
  return std::visit(V{}, c);
}

Command command_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
      throw MalformedMessage("command without a string 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "apply_wrench") {
      only_keys(j, {"kind", "force", "moment", "duration"});
      ApplyWrench w;
      w.wrench.force = vector<3>(j, "force");
      w.wrench.moment = vector<3>(j, "moment");
      w.duration = number(j, "duration");
      return w;
    }
    if (kind == "set_human_position") {
      only_keys(j, {"kind", "position"});
      return SetHumanPosition{vector<3>(j, "position")};
    }
    if (kind == "set_admittance_gains") {
      only_keys(j, {"kind", "mass", "damping", "stiffness"});
      SetAdmittanceGains g;
      g.gains.mass = vector<6>(j, "mass");
      g.gains.damping = vector<6>(j, "damping");
      g.gains.stiffness = vector<6>(j, "stiffness");
      return g;
    }
    if (kind == "set_safety_mode") {
      only_keys(j, {"kind", "mode", "human_clearance", "robot_clearance"});
      if (!j.contains("mode") || !j.at("mode").is_string()) throw MalformedMessage("missing string 'mode'");
      SetSafetyMode s;
      try {
        s.mode = safety_mode_from_string(j.at("mode").get<std::string>());
      } catch (const ConfigError& e) {
        throw MalformedMessage(e.what());
      }
      s.human_clearance = number(j, "human_clearance");
      s.robot_clearance = number(j, "robot_clearance");
      return s;
    }
    if (kind == "reset") {
      only_keys(j, {"kind", "seed"});
      if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
        throw MalformedMessage("reset: 'seed' must be an unsigned integer");
      }
      return ResetCommand{j.at("seed").get<std::uint64_t>()};
    }
    throw MalformedMessage("unknown command kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw MalformedMessage(e.what());
  }
}

bool StateFrame::operator==(const StateFrame& o) const {
  if (robots.size() != o.robots.size()) return false;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const RobotFrame& a = robots[i];
    const RobotFrame& b = o.robots[i];
    if (a.position != b.position || a.cable_direction != b.cable_direction ||
        a.tension_estimate != b.tension_estimate || a.thrust != b.thrust) {
      return false;
    }
  }
  return step == o.step && time == o.time && payload_position == o.payload_position &&
         payload_velocity == o.payload_velocity && payload_euler == o.payload_euler &&
         payload_omega == o.payload_omega && estimated_wrench == o.estimated_wrench &&
         applied_wrench == o.applied_wrench && desired_pose == o.desired_pose && human == o.human &&
         min_human_distance == o.min_human_distance && min_robot_distance == o.min_robot_distance &&
         safety_mode == o.safety_mode && human_clearance == o.human_clearance &&
         robot_clearance == o.robot_clearance;
}

json frame_to_json(const StateFrame& f) {
  json robots = json::array();
  for (const auto& r : f.robots) {
    robots.push_back({{"position", to_json_vec(r.position)},
                      {"cable_direction", to_json_vec(r.cable_direction)},
                      {"tension_estimate", r.tension_estimate},
                      {"thrust", r.thrust}});
  }
  return {{"step", f.step},
          {"time", f.time},
          {"payload",
           {{"position", to_json_vec(f.payload_position)},
            {"velocity", to_json_vec(f.payload_velocity)},
            {"euler", to_json_vec(f.payload_euler)},
            {"omega", to_json_vec(f.payload_omega)}}},
          {"robots", robots},
          {"estimated_wrench", to_json_vec(f.estimated_wrench)},
          {"applied_wrench", to_json_vec(f.applied_wrench)},
          {"desired_pose", to_json_vec(f.desired_pose)},
          {"human", f.human ? to_json_vec(*f.human) : json(nullptr)},
          {"distances",
           {{"min_human", f.min_human_distance ? json(*f.min_human_distance) : json(nullptr)},
            {"min_robot", f.min_robot_distance}}},
          {"safety",
           {{"mode", f.safety_mode},
            {"human_clearance", f.human_clearance},
            {"robot_clearance", f.robot_clearance}}}};
}

StateFrame frame_from_json(const json& j) {
  try {
    StateFrame f;
    if (!j.is_object()) throw MalformedMessage("frame is not an object");
    if (!j.contains("step") || !j.at("step").is_number_integer()) throw MalformedMessage("frame: bad step");
    f.step = j.at("step").get<long>();
    f.time = number(j, "time");
    const json& p = j.at("payload");
    f.payload_position = vector<3>(p, "position");
    f.payload_velocity = vector<3>(p, "velocity");
    f.payload_euler = vector<3>(p, "euler");
    f.payload_omega = vector<3>(p, "omega");
    if (!j.at("robots").is_array()) throw MalformedMessage("frame: robots must be an array");
    for (const auto& r : j.at("robots")) {
      RobotFrame rf;
      rf.position = vector<3>(r, "position");
      rf.cable_direction = vector<3>(r, "cable_direction");
      rf.tension_estimate = number(r, "tension_estimate");
      rf.thrust = number(r, "thrust");
      f.robots.push_back(rf);
    }
    f.estimated_wrench = vector<6>(j, "estimated_wrench");
    f.applied_wrench = vector<6>(j, "applied_wrench");
    f.desired_pose = vector<6>(j, "desired_pose");
    if (!j.at("human").is_null()) f.human = vector<3>(j, "human");
    const json& d = j.at("distances");
    if (!d.at("min_human").is_null()) f.min_human_distance = number(d, "min_human");
    f.min_robot_distance = number(d, "min_robot");
    const json& s = j.at("safety");
    if (!s.at("mode").is_string()) throw MalformedMessage("frame: safety.mode must be a string");
    f.safety_mode = s.at("mode").get<std::string>();
    f.human_clearance = number(s, "human_clearance");
    f.robot_clearance = number(s, "robot_clearance");
    return f;
  } catch (const json::exception& e) {
    throw MalformedMessage(e.what());
  }
}

std::string encode_frame(const StateFrame& f) {
  json j = envelope("frame");
  j["frame"] = frame_to_json(f);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

StateFrame decode_frame(std::string_view text) {
  const json j = parse_envelope(text, "frame");
  if (!j.contains("frame")) throw MalformedMessage("missing 'frame'");
  return frame_from_json(j.at("frame"));
}

std::string encode_command(const Command& c, std::optional<long> id) {
  json j = envelope("command");
  if (id) j["id"] = *id;
  j["command"] = command_to_json(c);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

ClientMessage decode_client_message(std::string_view text) {
  try {
    const json j = parse_envelope(text, "command");
    only_keys(j, {"schema", "version", "type", "id", "command"});
    ClientMessage m;
    m.id = optional_id(j);
    if (!j.contains("command")) throw MalformedMessage("missing 'command'");
    m.command = command_from_json(j.at("command"));
    return m;
  } catch (const json::exception& e) {
    throw MalformedMessage(e.what());
  }
}

std::string encode_ack(std::optional<long> id, const std::string& kind) {
  json j = envelope("ack");
  j["id"] = id_json(id);
  j["kind"] = kind;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string encode_error(std::optional<long> id, const std::string& message) {
  json j = envelope("error");
  j["id"] = id_json(id);
  j["message"] = message;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

StateFrame frame_from_record(const LogRecord& r, const std::vector<Vector3>& cable_directions,
                             const SafetyParams& safety) {
  StateFrame f;
  f.step = r.step;
  f.time = r.time;
  f.payload_position = r.payload_position;
  f.payload_velocity = r.payload_velocity;
  f.payload_euler = r.payload_euler;
  f.payload_omega = r.payload_omega;
  for (std::size_t k = 0; k < r.robots.size(); ++k) {
    RobotFrame rf;
    rf.position = r.robots[k].position;
    rf.cable_direction = k < cable_directions.size() ? cable_directions[k] : Vector3::Zero();
    rf.tension_estimate = r.robots[k].tension_estimate;
    rf.thrust = r.robots[k].thrust;
    f.robots.push_back(rf);
  }
  f.estimated_wrench = r.estimated_wrench;
  f.applied_wrench = r.applied_wrench;
  f.desired_pose = r.desired_pose;
  f.human = r.human;
  f.min_human_distance = r.min_human_distance;
  f.min_robot_distance = r.min_robot_distance;
  f.safety_mode = to_string(safety.mode);
  f.human_clearance = safety.human_clearance;
  f.robot_clearance = safety.robot_clearance;
  return f;
}

}  // namespace cstrans
