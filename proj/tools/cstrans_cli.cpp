// cstrans: run, replay, report, benchmark and serve scenarios.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cstrans/benchmark.hpp"
#include "cstrans/interaction_service.hpp"
#include "cstrans/report.hpp"
#include "cstrans/simulation.hpp"

namespace {

using cstrans::ScenarioConfig;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::atomic<cstrans::InteractionService*> g_service{nullptr};

void on_signal(int) {
  if (auto* s = g_service.load()) s->request_stop();
}

void write_outputs(const cstrans::RunLog& log, const std::string& out, const std::string& csv) {
  if (!out.empty()) cstrans::write_jsonl(log, out);
  if (!csv.empty()) cstrans::write_csv(log, csv);
}

void print_summary(const cstrans::RunLog& log) {
  std::cout << cstrans::summary_to_json(cstrans::summarize(log)).dump(2) << "\n";
}

ScenarioConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  ScenarioConfig c = path.empty() ? ScenarioConfig{} : cstrans::load_config(path);
  if (seed) c.seed = *seed;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative cable-suspended payload transport simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, csv_path, replay_path, log_path;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a scenario headlessly, or replay a log");
  run->add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_path, "JSONL run log");
  run->add_option("--csv", csv_path, "CSV export");
  run->add_option("--replay", replay_path, "Re-run a JSONL log from its header and commands");
  run->add_flag("--quiet", quiet, "Do not print the summary");

  auto* report = app.add_subcommand("report", "Summarize a JSONL run log");
  report->add_option("--log", log_path, "JSONL run log")->required();
  report->add_option("--csv", csv_path, "Also export the log as CSV");

  std::vector<int> sizes{3, 6, 12, 24};
  int reps = 50;
  auto* bench = app.add_subcommand("benchmark", "Time the allocators against team size");
  bench->add_option("--n", sizes, "Team sizes")->delimiter(',');
  bench->add_option("--reps", reps, "Repetitions per size")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "JSON output file");

  std::optional<int> port;
  auto* serve = app.add_subcommand("serve", "Run a scenario behind the WebSocket interface");
  serve->add_option("--config", config_path, "Scenario JSON");
  serve->add_option("--port", port, "Listen port (0 picks a free one)");
  serve->add_option("--seed", seed, "Override the scenario seed");
  serve->add_option("--out", out_path, "JSONL run log including received commands");
  serve->add_option("--csv", csv_path, "CSV export");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cstrans::RunLog log;
      if (!replay_path.empty()) {
        log = cstrans::replay_log(cstrans::read_jsonl(replay_path));
      } else {
        ScenarioConfig c = load(config_path, seed);
        if (out_path.empty()) out_path = c.output.log;
        if (csv_path.empty()) csv_path = c.output.csv;
        log = cstrans::run_scenario(c);
      }
      write_outputs(log, out_path, csv_path);
      if (!quiet) print_summary(log);
    } else if (*report) {
      const cstrans::RunLog log = cstrans::read_jsonl(log_path);
      if (!csv_path.empty()) cstrans::write_csv(log, csv_path);
      print_summary(log);
    } else if (*bench) {
      const auto rows = cstrans::benchmark_allocators(sizes, reps);
      const auto j = cstrans::benchmark_to_json(rows);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw cstrans::ConfigError("cannot write " + out_path);
        f << j.dump(2) << "\n";
      }
      std::cout << j.dump(2) << "\n";
    } else if (*serve) {
      ScenarioConfig c = load(config_path, seed);
      if (port) c.service.port = *port;
      if (out_path.empty()) out_path = c.output.log;
      if (csv_path.empty()) csv_path = c.output.csv;
      cstrans::InteractionService service(c);
      const auto bound = service.start();
      std::cerr << "listening on ws://" << c.service.host << ":" << bound << "\n";
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const cstrans::RunLog log = service.run();
      g_service = nullptr;
      service.stop();
      write_outputs(log, out_path, csv_path);
    }
  } catch (const cstrans::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cstrans::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return EXIT_SUCCESS;
}
