#include "doctest.h"

#include <random>

#include <nlohmann/json.hpp>

#include "cstrans/errors.hpp"
#include "cstrans/messages.hpp"

using namespace cstrans;
using nlohmann::json;

namespace {

std::vector<Command> every_command() {
  ApplyWrench w;
  w.wrench.force = Vector3(0.5, -0.25, 0.125);
  w.wrench.moment = Vector3(0.01, 0.02, 0.05);
  w.duration = 3.0;
  SetAdmittanceGains g;
  g.gains.mass << 0.25, 0.3, 0.35, 0.1, 0.11, 0.12;
  g.gains.damping << 1, 2, 5, 0.25, 0.5, 2.5;
  g.gains.stiffness << 1.2, 1.2, 1.2, 0, 0, 0;
  SetSafetyMode s;
  s.mode = SafetyMode::Optimization;
  s.human_clearance = 1.1;
  s.robot_clearance = 0.6;
  return {w, SetHumanPosition{Vector3(1.5, -2.0, 1.75)}, g, s, ResetCommand{1234567890123ULL}};
}

StateFrame sample_frame(bool with_human) {
  StateFrame f;
  f.step = 420;
  f.time = 1.05;
  f.payload_position = Vector3(0.1, 0.2, 1.0);
  f.payload_velocity = Vector3(0.01, -0.02, 0.0);
  f.payload_euler = Vector3(0.3, 0.01, -0.02);
  f.payload_omega = Vector3(0.0, 0.0, 0.2);
  for (int k = 0; k < 3; ++k) {
    RobotFrame r;
    r.position = Vector3(k, 0.5 * k, 2.0);
    r.cable_direction = Vector3(0, 0, -1);
    r.tension_estimate = 1.0 + 0.01 * k;
    r.thrust = 3.4;
    f.robots.push_back(r);
  }
  f.estimated_wrench << 0.49, 0.01, 0.0, 0.0, 0.0, 0.05;
  f.applied_wrench << 0.5, 0, 0, 0, 0, 0.05;
  f.desired_pose << 0.2, 0, 1, 0, 0, 0.1;
  if (with_human) {
    f.human = Vector3(2.0, 0.0, 2.0);
    f.min_human_distance = 1.2;
  }
  f.min_robot_distance = 0.86;
  f.safety_mode = "gradient";
  return f;
}

enum class Outcome { Ok, Mismatch, Malformed, Other };

template <typename F>
Outcome classify(F&& f) {
  try {
    f();
    return Outcome::Ok;
  } catch (const SchemaVersionMismatch&) {
    return Outcome::Mismatch;
  } catch (const MalformedMessage&) {
    return Outcome::Malformed;
  } catch (...) {
    return Outcome::Other;
  }
}

}  // namespace

TEST_CASE("every command variant round-trips") {
  for (const Command& c : every_command()) {
    for (std::optional<long> id : {std::optional<long>{}, std::optional<long>{17}}) {
      const std::string text = encode_command(c, id);
      const ClientMessage m = decode_client_message(text);
      CHECK(m.id == id);
      CHECK(m.command.index() == c.index());
      CHECK(command_to_json(m.command) == command_to_json(c));
      CHECK(encode_command(m.command, m.id) == text);
    }
    CHECK(command_to_json(command_from_json(command_to_json(c))) == command_to_json(c));
  }
  const auto w = std::get<ApplyWrench>(decode_client_message(encode_command(every_command()[0])).command);
  CHECK(w.wrench.force == Vector3(0.5, -0.25, 0.125));
  CHECK(w.duration == 3.0);
  const auto r = std::get<ResetCommand>(decode_client_message(encode_command(every_command()[4])).command);
  CHECK(r.seed == 1234567890123ULL);
}

TEST_CASE("state frames round-trip") {
  for (bool human : {true, false}) {
    const StateFrame f = sample_frame(human);
    const StateFrame back = decode_frame(encode_frame(f));
    CHECK(back == f);
    CHECK(back.human.has_value() == human);
  }
  const json j = json::parse(encode_frame(sample_frame(true)));
  CHECK(j.at("schema") == kWsSchema);
  CHECK(j.at("version") == kWsVersion);
  CHECK(j.at("type") == "frame");
}

TEST_CASE("envelope checks") {
  json j = json::parse(encode_command(every_command()[1], 3));
  j["version"] = kWsVersion + 1;
  CHECK_THROWS_AS(decode_client_message(j.dump()), SchemaVersionMismatch);
  json f = json::parse(encode_frame(sample_frame(false)));
  f["version"] = 0;
  CHECK_THROWS_AS(decode_frame(f.dump()), SchemaVersionMismatch);

  CHECK_THROWS_AS(decode_client_message("not json"), MalformedMessage);
  CHECK_THROWS_AS(decode_client_message("[1,2,3]"), MalformedMessage);
  CHECK_THROWS_AS(decode_client_message(R"({"schema":"other","version":1,"type":"command"})"), MalformedMessage);
  CHECK_THROWS_AS(decode_client_message(encode_frame(sample_frame(false))), MalformedMessage);
  json bad = json::parse(encode_command(every_command()[0]));
  bad["command"]["kind"] = "teleport";
  CHECK_THROWS_AS(decode_client_message(bad.dump()), MalformedMessage);
  bad = json::parse(encode_command(every_command()[0]));
  bad["command"]["force"] = {1, 2};
  CHECK_THROWS_AS(decode_client_message(bad.dump()), MalformedMessage);
  bad = json::parse(encode_command(every_command()[0]));
  bad["command"]["extra"] = 1;
  CHECK_THROWS_AS(decode_client_message(bad.dump()), MalformedMessage);
  bad = json::parse(encode_command(every_command()[0], 1));
  bad["id"] = "one";
  CHECK_THROWS_AS(decode_client_message(bad.dump()), MalformedMessage);

  const json ack = json::parse(encode_ack(5, "reset"));
  CHECK(ack.at("type") == "ack");
  CHECK(ack.at("id") == 5);
  const json err = json::parse(encode_error(std::nullopt, "nope"));
  CHECK(err.at("type") == "error");
  CHECK(err.at("id").is_null());
}

TEST_CASE("command bounds") {
  const CommandBounds b;
  for (const Command& c : every_command()) CHECK_NOTHROW(validate_command(c, b));
  ApplyWrench big;
  big.wrench.force = Vector3(0, 0, 20.5);
  big.duration = 1.0;
  CHECK_THROWS_AS(validate_command(big, b), MalformedMessage);
  big.wrench.force.setZero();
  big.wrench.moment = Vector3(2.5, 0, 0);
  CHECK_THROWS_AS(validate_command(big, b), MalformedMessage);
  ApplyWrench forever;
  forever.duration = 0.0;
  CHECK_THROWS_AS(validate_command(forever, b), MalformedMessage);
  SetAdmittanceGains g;
  g.gains.mass(0) = -1.0;
  CHECK_THROWS_AS(validate_command(g, b), MalformedMessage);
  SetSafetyMode s;
  s.robot_clearance = 0.0;
  CHECK_THROWS_AS(validate_command(s, b), MalformedMessage);
  CHECK(std::string(command_name(every_command()[3])) == "set_safety_mode");
}

TEST_CASE("fuzzed input only ever yields the documented errors") {
  std::mt19937_64 rng(2024);
  std::vector<std::string> seeds;
  for (const Command& c : every_command()) seeds.push_back(encode_command(c, 9));
  seeds.push_back(encode_frame(sample_frame(true)));
  seeds.push_back(encode_frame(sample_frame(false)));
  const std::string alphabet = "{}[]\":,0123456789.-+eE truefalsnul\\x";

  std::uniform_int_distribution<int> byte(0, 255), pick(0, 99);
  int ok = 0, rejected = 0, other = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string s;
    const int mode = i % 4;
    if (mode == 0) {
      const int len = pick(rng) * 2;
      for (int k = 0; k < len; ++k) s.push_back(static_cast<char>(byte(rng)));
    } else if (mode == 1) {
      const int len = pick(rng) * 2;
      for (int k = 0; k < len; ++k) s.push_back(alphabet[static_cast<std::size_t>(byte(rng)) % alphabet.size()]);
    } else {
      // Mutations of valid messages: flips, deletions, insertions, truncation.
      s = seeds[static_cast<std::size_t>(byte(rng)) % seeds.size()];
      const int edits = 1 + pick(rng) % 4;
      for (int e = 0; e < edits && !s.empty(); ++e) {
        const std::size_t at = static_cast<std::size_t>(byte(rng) * 997 + byte(rng)) % s.size();
        switch (pick(rng) % 4) {
          case 0: s[at] = static_cast<char>(byte(rng)); break;
          case 1: s.erase(at, 1); break;
          case 2: s.insert(at, 1, alphabet[static_cast<std::size_t>(byte(rng)) % alphabet.size()]); break;
          default: s.resize(at); break;
        }
      }
    }
    for (Outcome o : {classify([&] { decode_client_message(s); }), classify([&] { decode_frame(s); })}) {
      if (o == Outcome::Ok) ++ok;
      else if (o == Outcome::Other) ++other;
      else ++rejected;
    }
  }
  CHECK(other == 0);
  CHECK(rejected > 0);
  CHECK(ok + rejected + other == 200000);
}

TEST_CASE("structurally valid JSON with wrong field types is rejected cleanly") {
  std::mt19937_64 rng(77);
  const std::vector<json> junk = {nullptr, true, -1, 1e308, "x", json::array(), json::object(),
                                  json::array({1, 2, 3}), json::array({"a", "b", "c"}), 3.5};
  int other = 0;
  for (const Command& c : every_command()) {
    const json base = json::parse(encode_command(c, 1));
    for (const auto& [key, _] : base.at("command").items()) {
      for (const json& v : junk) {
        json m = base;
        m["command"][key] = v;
        if (classify([&] { decode_client_message(m.dump()); }) == Outcome::Other) ++other;
      }
    }
    for (const char* top : {"schema", "version", "type", "id", "command"}) {
      for (const json& v : junk) {
        json m = base;
        m[top] = v;
        if (classify([&] { decode_client_message(m.dump()); }) == Outcome::Other) ++other;
      }
    }
  }
  const json frame = json::parse(encode_frame(sample_frame(true)));
  for (const auto& [key, _] : frame.at("frame").items()) {
    for (const json& v : junk) {
      json m = frame;
      m["frame"][key] = v;
      if (classify([&] { decode_frame(m.dump()); }) == Outcome::Other) ++other;
    }
  }
  CHECK(other == 0);
}
