// gctl: run closed-loop scenarios and recompute trace metrics.
//
//   gctl run scenarios/lti_sine.ini --out out/ --controller pid
//   gctl batch scenarios/ --out out/
//   gctl metrics out/lti_sine.csv

#include "gctl/errors.hpp"
#include "gctl/metrics.hpp"
#include "gctl/scenario.hpp"
#include "gctl/trace_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace {

struct RunOptions {
  std::string plant, controller, traj, gust;
  std::optional<double> dt, duration;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string out = "out";
  bool quiet = false;
};

gctl::Overrides overrides_of(const RunOptions& o) {
  gctl::Overrides ov;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw gctl::ContractViolation("--set expects section.key=value, got '" + s + "'");
    ov[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!o.plant.empty()) ov["scenario.plant"] = o.plant;
  if (!o.controller.empty()) ov["scenario.controller"] = o.controller;
  if (!o.traj.empty()) ov["trajectory.kind"] = o.traj;
  if (!o.gust.empty()) ov["scenario.gust"] = o.gust;
  if (o.dt) ov["scenario.dt"] = gctl::format_double(*o.dt);
  if (o.duration) ov["scenario.duration"] = gctl::format_double(*o.duration);
  if (o.seed) ov["scenario.seed"] = std::to_string(*o.seed);
  return ov;
}

// Runs one scenario file and writes its outputs; returns false on divergence.
bool run_one(const fs::path& config, const RunOptions& o, std::ostream& log) {
  const gctl::ScenarioConfig cfg = gctl::load_scenario(config.string(), overrides_of(o));
  const gctl::ScenarioResult res = gctl::run_scenario(cfg);
  const auto files = gctl::emit(res, o.out);
  if (!o.quiet) {
    gctl::write_summary(log, res);
    log << "csv = " << files.csv.string() << "\n\n";
  }
  if (!res.ok()) {
    std::cerr << config.string() << ": diverged: " << *res.failure << '\n';
    return false;
  }
  return true;
}

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--plant", o.plant, "lti2, hexa or bifw");
  cmd->add_option("--controller", o.controller, "g or pid");
  cmd->add_option("--traj", o.traj, "trajectory kind");
  cmd->add_option("--dt", o.dt, "control step [s]");
  cmd->add_option("--duration", o.duration, "run length [s]");
  cmd->add_option("--seed", o.seed, "noise seed");
  cmd->add_option("--gust", o.gust, "on/off");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--set", o.sets, "section.key=value override (repeatable)");
  cmd->add_flag("-q,--quiet", o.quiet, "do not print summaries");
}

int cmd_metrics(const std::string& path) {
  const auto rows = gctl::read_csv(path);
  gctl::ScenarioResult res;
  res.name = fs::path(path).stem().string();
  res.rows = rows;
  res.summary = gctl::metrics(rows);
  gctl::write_summary(std::cout, res);
  return 0;
}

int cmd_batch(const fs::path& dir, const RunOptions& o) {
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ini")
      configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << "no .ini files in " << dir.string() << '\n';
    return 2;
  }

  std::mutex log_mutex;
  std::vector<int> status(configs.size(), 0);
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    workers.emplace_back([&, i] {
      std::ostringstream log;
      try {
        status[i] = run_one(configs[i], o, log) ? 0 : 1;
      } catch (const std::exception& e) {
        log << configs[i].string() << ": error: " << e.what() << '\n';
        status[i] = 2;
      }
      const std::lock_guard lock(log_mutex);
      std::cout << log.str();
    });
  }
  for (auto& w : workers) w.join();
  return *std::max_element(status.begin(), status.end());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-evolving neuro-fuzzy controller simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::string config;
  auto* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("config", config, "scenario .ini file")->required()->check(CLI::ExistingFile);
  add_run_options(run, run_opts);

  RunOptions batch_opts;
  std::string batch_dir;
  auto* batch = app.add_subcommand("batch", "run every .ini in a directory, one thread each");
  batch->add_option("dir", batch_dir, "scenario directory")->required()->check(CLI::ExistingDirectory);
  add_run_options(batch, batch_opts);

  std::string csv;
  auto* met = app.add_subcommand("metrics", "recompute summary metrics from a trace CSV");
  met->add_option("csv", csv, "trace CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_one(config, run_opts, std::cout) ? 0 : 1;
    if (*batch) return cmd_batch(batch_dir, batch_opts);
    if (*met) return cmd_metrics(csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
