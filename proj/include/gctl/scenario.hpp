#pragma once

// Closed-loop scenario runner. One loop skeleton serves both controllers:
//
//   sample reference -> read plant output -> controller -> apply u -> log row
//
// Scenario files are INI-style:
//
//   [scenario]   name, plant, controller, dt, duration, seed, noise_std, gust
//   [trajectory] kind, amplitude, frequency, offset, switch_time, steps, knots
//   [plant]      lti_zeta, lti_omega_n, lti_gain, hexa_mass, hexa_drag,
//                bifw_mass, flap_frequency, u_min, u_max, ...
//   [gust]       peak_velocity, onset_time, duration, force_per_velocity
//   [evolution]  rho_a, rho_b, delta, k_fs, k_win, ds_threshold, ern_mode, ...
//   [smc]        g0, alpha_initial, alpha_target, alpha_rate, sat_bound, ...
//   [inputs]     error_range, error_rate_range, derivative_tau_steps
//   [pid]        kp, ki, kd, u_lo, u_hi

#include "gctl/g_controller.hpp"
#include "gctl/pid.hpp"
#include "gctl/plants.hpp"
#include "gctl/trace.hpp"
#include "gctl/trajectory.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace gctl {

enum class PlantKind { lti2, hexa, bifw };
enum class ControllerKind { g, pid };

PlantKind parse_plant_kind(const std::string& s);
ControllerKind parse_controller_kind(const std::string& s);
std::string to_string(PlantKind k);
std::string to_string(ControllerKind k);

struct ScenarioConfig {
  std::string name = "scenario";
  PlantKind plant = PlantKind::lti2;
  ControllerKind controller = ControllerKind::g;
  Trajectory trajectory;
  double dt = 0.01;
  std::uint64_t seed = 1;
  double noise_std = 0.0;  // measurement noise on y, seeded
  bool gust_enabled = false;
  GustModel gust;

  Lti2Params lti;
  HexaParams hexa;
  BifwParams bifw;
  FlappingParams flap;
  // Plant input = trim + u, clamped to [u_min, u_max] when given.
  std::optional<double> u_min, u_max;
  std::optional<double> trim;  // default: hover thrust / hover amplitude / 0

  GControllerConfig g;
  PidGains pid;

  double duration() const { return trajectory.duration; }
  void validate() const;
};

// key -> value overrides, keys are "section.key".
using Overrides = std::map<std::string, std::string>;

ScenarioConfig load_scenario(const std::string& path, const Overrides& overrides = {});
ScenarioConfig parse_scenario(const std::string& text, const Overrides& overrides = {});

// Runs the configured controller. On divergence the result carries the rows up
// to the failing step and a diagnostic in `failure`.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Same loop with the PID controller regardless of cfg.controller.
ScenarioResult run_pid(const ScenarioConfig& cfg);

}  // namespace gctl
