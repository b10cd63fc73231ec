#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cstrans/config.hpp"
#include "cstrans/errors.hpp"
#include "cstrans/report.hpp"
#include "cstrans/run_log.hpp"
#include "cstrans/simulation.hpp"
#include "cstrans/trajectory.hpp"
#include "oracles.hpp"

using namespace cstrans;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string dump(const RunLog& log) {
  std::ostringstream out;
  write_jsonl(log, out);
  return out.str();
}

ScenarioConfig short_config(double duration = 1.0, std::uint64_t seed = 3) {
  ScenarioConfig c;
  c.duration = duration;
  c.seed = seed;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cstrans_unit";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CSTRANS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("config defaults validate and round-trip through JSON") {
  const ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.rates.substeps() == 5);
  const json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK(config_from_json(json::object()).team.n == 3);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(config_from_json(json{{"durration", 3.0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"team", {{"n", 3}, {"mass", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"duration", "long"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"team", {{"n", 2}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"rates", {{"sim_dt", 0.001}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"safety", {{"mode", "fast"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"trajectory", {{"type", "spline"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"admittance", {{"mass", {1, 1, 1}}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cstrans.json"), ConfigError);

  const ScenarioConfig c = config_from_json(
      json{{"seed", 9}, {"team", {{"n", 4}}}, {"safety", {{"mode", "optimization"}}},
           {"trajectory", {{"type", "waypoints"},
                           {"points", {{{"t", 0.0}, {"position", {0, 0, 1}}, {"yaw", 0.0}},
                                       {{"t", 2.0}, {"position", {1, 0, 1}}, {"yaw", 0.5}}}}}}});
  CHECK(c.seed == 9);
  CHECK(c.team.n == 4);
  CHECK(c.safety.mode == SafetyMode::Optimization);
  CHECK(c.trajectory.kind == TrajectorySpec::Kind::Waypoints);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("reference trajectories") {
  TrajectorySpec w;
  w.kind = TrajectorySpec::Kind::Waypoints;
  w.waypoints = {{0.0, Vector3(0, 0, 1), 0.0}, {2.0, Vector3(2, 0, 1), 0.4}, {4.0, Vector3(2, 2, 1), 0.4}};
  const ReferenceTrajectory tw(w);
  CHECK((tw.sample(1.0).pose.head<3>() - Vector3(1, 0, 1)).norm() < 1e-15);
  CHECK(tw.sample(1.0).pose(5) == doctest::Approx(0.2));
  CHECK((tw.sample(1.0).velocity.head<3>() - Vector3(1, 0, 0)).norm() < 1e-15);
  CHECK((tw.sample(3.0).velocity.head<3>() - Vector3(0, 1, 0)).norm() < 1e-15);
  CHECK((tw.sample(-1.0).pose.head<3>() - Vector3(0, 0, 1)).norm() == 0.0);
  CHECK(tw.sample(9.0).velocity.isZero(0.0));

  // p(t) = 1 + 2 t + 3 t^2 - t^3
  const PolySample p = eval_polynomial({1, 2, 3, -1}, 2.0);
  CHECK(p.value == doctest::Approx(1 + 4 + 12 - 8));
  CHECK(p.d1 == doctest::Approx(2 + 12 - 12));
  CHECK(p.d2 == doctest::Approx(6 - 12));

  TrajectorySpec poly;
  poly.kind = TrajectorySpec::Kind::Polynomial;
  poly.polynomial_start = 1.0;
  poly.segments = {{2.0, {0, 1}, {0}, {1}, {0}}, {1.0, {2, 0, 1}, {0}, {1}, {0}}};
  const ReferenceTrajectory tp(poly);
  CHECK(tp.sample(2.0).pose(0) == doctest::Approx(1.0));
  CHECK(tp.sample(3.5).pose(0) == doctest::Approx(2.25));
  CHECK(tp.sample(3.5).acceleration(0) == doctest::Approx(2.0));
  CHECK(tp.sample(10.0).pose(0) == doctest::Approx(3.0));
  CHECK(tp.sample(10.0).velocity.isZero(0.0));

  const std::vector<WrenchEvent> script = {{1.0, 2.0, Vector3(0.5, 0, 0), Vector3::Zero()},
                                           {2.0, 1.0, Vector3(0, 0.1, 0), Vector3(0, 0, 0.05)}};
  CHECK(scripted_wrench(script, 0.5).stacked().isZero(0.0));
  CHECK((scripted_wrench(script, 2.5).force - Vector3(0.5, 0.1, 0)).norm() == 0.0);
  CHECK(scripted_wrench(script, 3.0).stacked().isZero(0.0));

  CHECK(!human_position({}, 1.0).has_value());
  const std::vector<HumanPathPoint> path = {{0.0, Vector3(4, 0, 2)}, {4.0, Vector3(2, 0, 2)}};
  CHECK((*human_position(path, 1.0) - Vector3(3.5, 0, 2)).norm() < 1e-15);
}

TEST_CASE("every control step emits one record at the configured rate") {
  const RunLog log = run_scenario(short_config(0.5));
  REQUIRE(log.records.size() == 200);
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    CHECK(log.records[i].step == static_cast<long>(i));
    CHECK(log.records[i].time == doctest::Approx(0.0025 * static_cast<double>(i)));
    CHECK(log.records[i].robots.size() == 3);
  }
  CHECK(log.header.at("schema") == kLogSchema);
}

TEST_CASE("runs are deterministic for a seed and differ across seeds") {
  const std::string a = dump(run_scenario(short_config(1.0, 5)));
  const std::string b = dump(run_scenario(short_config(1.0, 5)));
  const std::string c = dump(run_scenario(short_config(1.0, 6)));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("JSONL round trip and replay with injected commands") {
  ScenarioConfig cfg = short_config(1.5, 4);
  Simulation sim(cfg);
  RunLog log;
  log.header = make_log_header(cfg);
  while (!sim.finished()) {
    if (sim.step_index() == 100) {
      ApplyWrench w;
      w.wrench.force = Vector3(0.5, 0, 0);
      w.duration = 0.5;
      sim.submit(w);
      SetSafetyMode m;
      m.mode = SafetyMode::Gradient;
      sim.submit(m);
    }
    if (sim.step_index() == 300) sim.submit(SetHumanPosition{Vector3(2.0, 0.0, 2.0)});
    log.records.push_back(sim.step());
  }
  log.commands = sim.applied_commands();
  REQUIRE(log.commands.size() == 3);
  CHECK(log.commands[0].step == 100);
  CHECK(log.records[150].applied_wrench(0) == doctest::Approx(0.5));
  CHECK(log.records[150].safety_mode == "gradient");
  CHECK(log.records[400].applied_wrench.isZero(0.0));

  const fs::path path = scratch("roundtrip.jsonl");
  write_jsonl(log, path.string());
  const RunLog back = read_jsonl(path.string());
  CHECK(dump(back) == dump(log));
  CHECK(back.records.size() == log.records.size());
  CHECK(back.commands.size() == 3);

  const RunLog replayed = replay_log(back);
  CHECK(dump(replayed) == dump(log));

  std::istringstream garbage("{\"schema\": \"other\"}\n");
  CHECK_THROWS_AS(read_jsonl(garbage), ConfigError);
  CHECK_THROWS_AS(read_jsonl("/nonexistent/log.jsonl"), ConfigError);
}

TEST_CASE("CSV export carries the logged values") {
  const RunLog log = run_scenario(short_config(0.25));
  std::ostringstream out;
  write_csv(log, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  REQUIRE(column("z") < header.size());
  REQUIRE(column("r2_thrust") < header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == header.size());
    const LogRecord& r = log.records[row];
    CHECK(std::stol(cells[column("step")]) == r.step);
    CHECK(std::stod(cells[column("z")]) == doctest::Approx(r.payload_position.z()).epsilon(1e-9));
    CHECK(std::stod(cells[column("est_fx")]) == doctest::Approx(r.estimated_wrench(0)).epsilon(1e-9));
    CHECK(std::stod(cells[column("r1_tension_est")]) ==
          doctest::Approx(r.robots[1].tension_estimate).epsilon(1e-9));
    ++row;
  }
  CHECK(row == log.records.size());
}

TEST_CASE("rmse on a hand-computed series") {
  // errors 1, -2, 2: sqrt((1 + 4 + 4) / 3) = sqrt(3)
  CHECK(rmse({1.0, 0.0, 5.0}, {0.0, 2.0, 3.0}) == doctest::Approx(std::sqrt(3.0)));
  CHECK(rmse({1.0, 0.0, 5.0}, {0.0, 2.0, 3.0}) == doctest::Approx(oracle::rmse({1, 0, 5}, {0, 2, 3})));
  CHECK_THROWS(rmse({1.0}, {1.0, 2.0}));
}

TEST_CASE("report distances match a brute-force recomputation") {
  ScenarioConfig cfg = short_config(2.0);
  cfg.human_path = {{0.0, Vector3(3.0, 0.0, 2.0)}, {2.0, Vector3(1.5, 0.5, 2.0)}};
  const RunLog log = run_scenario(cfg);
  double human = INFINITY, robot = INFINITY;
  for (const auto& r : log.records) {
    std::vector<Vector3> x;
    for (const auto& rb : r.robots) x.push_back(rb.position);
    robot = std::min(robot, oracle::min_pairwise(x));
    REQUIRE(r.human.has_value());
    human = std::min(human, oracle::min_to_point(x, *r.human));
    CHECK(*r.min_human_distance == doctest::Approx(oracle::min_to_point(x, *r.human)).epsilon(1e-12));
  }
  const DistanceExtrema d = recompute_distances(log);
  CHECK(*d.human == doctest::Approx(human).epsilon(1e-12));
  CHECK(d.robot == doctest::Approx(robot).epsilon(1e-12));
  const ReportSummary s = summarize(log);
  CHECK(*s.min_human_distance == doctest::Approx(human).epsilon(1e-12));
  CHECK(s.min_robot_distance == doctest::Approx(robot).epsilon(1e-12));
  CHECK(s.records == static_cast<long>(log.records.size()));
}

TEST_CASE("report on an exact wrench log") {
  RunLog log = run_scenario(short_config(1.0));
  for (auto& r : log.records) {
    r.estimated_wrench = r.applied_wrench;
    r.estimated_wrench_raw = r.applied_wrench;
  }
  const ReportSummary s = summarize(log);
  CHECK(s.wrench_rmse.norm() < 1e-9);
  CHECK(s.wrench_rmse_raw.norm() < 1e-9);
  CHECK(s.impedance_ratio.array().isNaN().all());
  const json j = summary_to_json(s);
  CHECK(j.contains("wrench_rmse"));
}

TEST_CASE("zero-noise hover regulates the payload") {
  ScenarioConfig cfg = short_config(10.0);
  cfg.sensor_noise = MeasurementNoise{};
  const RunLog log = run_scenario(cfg);
  double sq = 0.0;
  int count = 0;
  for (const auto& r : log.records) {
    if (r.time < 2.0) continue;
    sq += (r.payload_position - Vector3(0, 0, 1)).squaredNorm();
    ++count;
  }
  CHECK(std::sqrt(sq / count) < 0.02);
  CHECK(summarize(log).tracking_rms < 0.02);
}

TEST_CASE("noisy hover regulates the payload") {
  const RunLog log = run_scenario(short_config(10.0, 11));
  CHECK(summarize(log).tracking_rms < 0.02);
  CHECK(summarize(log).max_nullspace_residual < 1e-9);
}

TEST_CASE("CLI exit codes") {
  const fs::path good = scratch("good.json");
  std::ofstream(good) << R"({"duration": 0.1})";
  const fs::path log = scratch("cli.jsonl");
  CHECK(run_cli("run --config " + good.string() + " --out " + log.string() + " --quiet") == 0);
  CHECK(run_cli("report --log " + log.string()) == 0);
  CHECK(run_cli("run --replay " + log.string() + " --quiet") == 0);

  const fs::path unknown = scratch("unknown.json");
  std::ofstream(unknown) << R"({"duration": 0.1, "tema": {}})";
  CHECK(run_cli("run --config " + unknown.string() + " --quiet") == 2);
  CHECK(run_cli("run --config /nonexistent/x.json --quiet") == 2);
  const fs::path malformed = scratch("malformed.json");
  std::ofstream(malformed) << R"({"duration": )";
  CHECK(run_cli("run --config " + malformed.string() + " --quiet") == 2);

  const fs::path blowup = scratch("blowup.json");
  std::ofstream(blowup) << R"({"duration": 0.5, "team": {"cable_stiffness": 1e9}})";
  CHECK(run_cli("run --config " + blowup.string() + " --quiet") == 3);
  CHECK(run_cli("benchmark --n 3,6 --reps 2") == 0);
}
