#include "gctl/scenario.hpp"

#include "gctl/errors.hpp"
#include "gctl/metrics.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace gctl {

PlantKind parse_plant_kind(const std::string& s) {
  if (s == "lti2" || s == "lti") return PlantKind::lti2;
  if (s == "hexa") return PlantKind::hexa;
  if (s == "bifw") return PlantKind::bifw;
  throw ContractViolation("unknown plant '" + s + "' (expected lti2, hexa or bifw)");
}

ControllerKind parse_controller_kind(const std::string& s) {
  if (s == "g" || s == "gctl") return ControllerKind::g;
  if (s == "pid") return ControllerKind::pid;
  throw ContractViolation("unknown controller '" + s + "' (expected g or pid)");
}

std::string to_string(PlantKind k) {
  switch (k) {
    case PlantKind::lti2: return "lti2";
    case PlantKind::hexa: return "hexa";
    case PlantKind::bifw: return "bifw";
  }
  return "?";
}

std::string to_string(ControllerKind k) { return k == ControllerKind::g ? "g" : "pid"; }

void ScenarioConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("scenario: dt must be positive");
  trajectory.validate();
  if (trajectory.duration < dt) throw ContractViolation("scenario: duration shorter than dt");
  if (!(noise_std >= 0.0)) throw ContractViolation("scenario: noise_std must be >= 0");
  if (u_min && u_max && !(*u_min < *u_max))
    throw ContractViolation("scenario: u_min must be below u_max");
  gust.validate();
  flap.validate();
  bifw.geometry.validate();
  if (!(hexa.mass > 0.0)) throw ContractViolation("scenario: hexa mass must be positive");
  if (!(lti.omega_n > 0.0) || !(lti.zeta >= 0.0))
    throw ContractViolation("scenario: lti requires omega_n > 0 and zeta >= 0");
  if (controller == ControllerKind::g) g.validate();
  pid.validate();
}

// ---------------------------------------------------------------------------
// Config loading

namespace {

using boost::property_tree::ptree;

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ContractViolation(key + ": '" + v + "' is not a number");
  }
  while (used < v.size() && std::isspace(static_cast<unsigned char>(v[used]))) ++used;
  if (used != v.size()) throw ContractViolation(key + ": '" + v + "' is not a number");
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.size() != n)
    throw ContractViolation(key + ": expected " + std::to_string(n) + " comma-separated values");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ContractViolation(key + ": '" + v + "' is not a boolean");
}

class Reader {
 public:
  explicit Reader(const ptree& pt) : pt_(pt) {}

  template <class F>
  void with(const std::string& key, F&& apply) {
    known_.insert(key);
    if (auto v = pt_.get_optional<std::string>(key)) apply(key, *v);
  }

  void num(const std::string& key, double& dst) {
    with(key, [&](const std::string& k, const std::string& v) { dst = to_double(k, v); });
  }
  void num(const std::string& key, std::optional<double>& dst) {
    with(key, [&](const std::string& k, const std::string& v) { dst = to_double(k, v); });
  }
  void triple(const std::string& key, Triple& dst) {
    with(key, [&](const std::string& k, const std::string& v) {
      const auto xs = to_list(k, v, 3);
      dst = {xs[0], xs[1], xs[2]};
    });
  }
  void range(const std::string& key, InputRange& dst) {
    with(key, [&](const std::string& k, const std::string& v) {
      const auto xs = to_list(k, v, 2);
      dst = {xs[0], xs[1]};
    });
  }

  void reject_unknown() const {
    for (const auto& [section, body] : pt_) {
      if (body.empty() && !body.data().empty())
        throw ContractViolation("config: key '" + section + "' outside any section");
      for (const auto& [key, _] : body) {
        const std::string full = section + "." + key;
        if (!known_.count(full)) throw ContractViolation("config: unknown key '" + full + "'");
      }
    }
  }

 private:
  const ptree& pt_;
  std::set<std::string> known_;
};

ScenarioConfig from_tree(const ptree& pt) {
  ScenarioConfig c;
  Reader r(pt);

  r.with("scenario.name", [&](auto&, const std::string& v) { c.name = v; });
  r.with("scenario.plant", [&](auto&, const std::string& v) { c.plant = parse_plant_kind(v); });
  r.with("scenario.controller",
         [&](auto&, const std::string& v) { c.controller = parse_controller_kind(v); });
  r.num("scenario.dt", c.dt);
  r.num("scenario.duration", c.trajectory.duration);
  r.with("scenario.seed", [&](const std::string& k, const std::string& v) {
    const double s = to_double(k, v);
    if (s < 0.0 || s != std::floor(s)) throw ContractViolation(k + ": expected an integer >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  });
  r.num("scenario.noise_std", c.noise_std);
  r.with("scenario.gust",
         [&](const std::string& k, const std::string& v) { c.gust_enabled = to_bool(k, v); });

  Trajectory& tr = c.trajectory;
  r.with("trajectory.kind",
         [&](auto&, const std::string& v) { tr.kind = parse_trajectory_kind(v); });
  r.num("trajectory.amplitude", tr.amplitude);
  r.num("trajectory.frequency", tr.frequency);
  r.num("trajectory.offset", tr.offset);
  r.num("trajectory.switch_time", tr.switch_time);
  r.with("trajectory.steps", [&](auto&, const std::string& v) { tr.steps = parse_pairs(v); });
  r.with("trajectory.knots", [&](auto&, const std::string& v) { tr.knots = parse_pairs(v); });

  r.num("plant.lti_zeta", c.lti.zeta);
  r.num("plant.lti_omega_n", c.lti.omega_n);
  r.num("plant.lti_gain", c.lti.gain);
  r.num("plant.hexa_mass", c.hexa.mass);
  r.num("plant.hexa_drag", c.hexa.drag_coeff);
  r.num("plant.gravity", c.hexa.gravity);
  c.bifw.geometry.gravity = c.hexa.gravity;
  r.num("plant.bifw_mass", c.bifw.geometry.mass);
  r.num("plant.bifw_lift_coeff", c.bifw.lift_coeff);
  r.num("plant.flap_frequency", c.flap.frequency);
  r.num("plant.flap_mean_aoa", c.flap.mean_aoa);
  r.num("plant.flap_pitch_amp", c.flap.pitch_amp);
  r.num("plant.flap_phase", c.flap.phase);
  r.num("plant.trim", c.trim);
  r.num("plant.u_min", c.u_min);
  r.num("plant.u_max", c.u_max);

  r.num("gust.peak_velocity", c.gust.peak_velocity);
  r.num("gust.onset_time", c.gust.onset_time);
  r.num("gust.duration", c.gust.duration);
  r.num("gust.force_per_velocity", c.gust.force_per_velocity);

  EvolutionConfig& ev = c.g.evolution;
  r.num("evolution.rho_a", ev.rho_a);
  r.num("evolution.rho_b", ev.rho_b);
  r.num("evolution.delta", ev.delta);
  r.num("evolution.k_fs", ev.k_fs);
  r.num("evolution.k_win", ev.k_win);
  r.num("evolution.epsilon_complete", ev.epsilon_complete);
  r.num("evolution.ds_threshold", ev.ds_threshold);
  r.num("evolution.min_volume_ratio", ev.min_volume_ratio);
  r.with("evolution.ern_mode", [&](const std::string& k, const std::string& v) {
    if (v == "tracking") ev.ern_mode = ErnMode::tracking;
    else if (v == "literal") ev.ern_mode = ErnMode::literal;
    else throw ContractViolation(k + ": expected tracking or literal");
  });

  SmcConfig& smc = c.g.smc;
  r.num("smc.g0", smc.g0);
  r.triple("smc.alpha_initial", smc.alpha_initial);
  r.triple("smc.alpha_target", smc.alpha_target);
  r.triple("smc.alpha_rate", smc.alpha_rate);
  r.num("smc.sat_bound", smc.sat_bound);
  r.with("smc.gain_update", [&](const std::string& k, const std::string& v) {
    if (v == "riccati") smc.gain_update = GainUpdate::riccati;
    else if (v == "euler") smc.gain_update = GainUpdate::euler;
    else throw ContractViolation(k + ": expected riccati or euler");
  });
  r.num("smc.v_hat_initial", c.g.v_hat_initial);

  r.range("inputs.error_range", c.g.error_range);
  r.range("inputs.error_rate_range", c.g.error_rate_range);
  r.num("inputs.derivative_tau_steps", c.g.derivative_tau_steps);

  r.num("pid.kp", c.pid.kp);
  r.num("pid.ki", c.pid.ki);
  r.num("pid.kd", c.pid.kd);
  r.num("pid.u_lo", c.pid.u_lo);
  r.num("pid.u_hi", c.pid.u_hi);

  r.reject_unknown();
  c.validate();
  return c;
}

ptree apply_overrides(ptree pt, const Overrides& overrides) {
  for (const auto& [key, value] : overrides) {
    if (key.find('.') == std::string::npos)
      throw ContractViolation("override '" + key + "' must be of the form section.key");
    pt.put(key, value);
  }
  return pt;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const Overrides& overrides) {
  ptree pt;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ContractViolation(std::string("config: ") + e.what());
  }
  return from_tree(apply_overrides(std::move(pt), overrides));
}

ScenarioConfig load_scenario(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), overrides);
  } catch (const ContractViolation& e) {
    throw ContractViolation(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Closed loop

namespace {

struct PlantInput {
  double trim = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

PlantInput plant_input(const ScenarioConfig& c) {
  PlantInput in;
  switch (c.plant) {
    case PlantKind::lti2: break;
    case PlantKind::hexa:
      // Thrust around hover, never negative.
      in.trim = c.hexa.mass * c.hexa.gravity;
      in.lo = 0.0;
      in.hi = 4.0 * in.trim;
      break;
    case PlantKind::bifw:
      // Flapping amplitude around the hover calibration point.
      in.trim = c.flap.amplitude;
      in.lo = 0.0;
      in.hi = std::numbers::pi;
      break;
  }
  if (c.trim) in.trim = *c.trim;
  if (c.u_min) in.lo = *c.u_min;
  if (c.u_max) in.hi = *c.u_max;
  return in;
}

using ControlFn = std::function<void(TraceRow&, std::size_t)>;

ScenarioResult run_loop(const ScenarioConfig& c, const ControlFn& control) {
  c.validate();
  ScenarioResult res;
  res.name = c.name;

  const GustModel gust = [&] {
    GustModel g = c.gust;
    if (!c.gust_enabled) g.force_per_velocity = 0.0;
    return g;
  }();
  const PlantInput in = plant_input(c);
  FlappingParams flap = c.flap;
  flap.dt = c.dt;

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> noise(0.0, c.noise_std > 0.0 ? c.noise_std : 1.0);

  PlantState state;
  const auto n_steps = static_cast<std::size_t>(std::llround(c.duration() / c.dt));
  res.rows.reserve(n_steps);

  std::size_t n = 0;
  try {
    for (; n < n_steps; ++n) {
      const double t = static_cast<double>(n) * c.dt;
      TraceRow row;
      row.t = t;
      row.ref = reference(c.trajectory, t);
      row.y = state.position + (c.noise_std > 0.0 ? c.noise_std * noise(rng) : 0.0);
      row.e = row.ref - row.y;
      control(row, n);
      res.rows.push_back(row);

      const double cmd = std::clamp(in.trim + row.u, in.lo, in.hi);
      switch (c.plant) {
        case PlantKind::lti2:
          state = step_lti2(state, cmd, c.dt, c.lti, gust.force(t));
          break;
        case PlantKind::hexa:
          state = step_hexa_altitude(state, cmd, gust, t, c.dt, c.hexa);
          break;
        case PlantKind::bifw:
          flap.amplitude = cmd;
          state = step_bifw(state, flap, c.bifw, gust, t, c.dt);
          break;
      }
      check_finite(state, n);
    }
  } catch (const DivergenceError& e) {
    res.failure = e.what();
  } catch (const NumericalError& e) {
    res.failure = "step " + std::to_string(n) + ": " + e.what();
  }

  if (res.rows.size() >= 2) res.summary = metrics(res.rows);
  return res;
}

// Controller-side output range implied by the plant input range.
std::optional<InputRange> output_range(const ScenarioConfig& c) {
  const PlantInput in = plant_input(c);
  if (!std::isfinite(in.lo) || !std::isfinite(in.hi)) return std::nullopt;
  return InputRange{in.lo - in.trim, in.hi - in.trim};
}

}  // namespace

ScenarioResult run_pid(const ScenarioConfig& cfg) {
  PidGains gains = cfg.pid;
  if (const auto r = output_range(cfg)) {
    gains.u_lo = std::max(gains.u_lo, r->lo);
    gains.u_hi = std::min(gains.u_hi, r->hi);
  }
  PidController pid(gains, cfg.g.derivative_tau_steps);
  return run_loop(cfg, [&](TraceRow& row, std::size_t) {
    row.u = pid.step(row.ref, row.y, cfg.dt);
  });
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.controller == ControllerKind::pid) return run_pid(cfg);

  GControllerConfig gcfg = cfg.g;
  if (!gcfg.output_limits) gcfg.output_limits = output_range(cfg);
  GController ctl(gcfg);
  ScenarioResult res = run_loop(cfg, [&](TraceRow& row, std::size_t) {
    const ControlStep s = ctl.step(row.ref, row.y, cfg.dt);
    row.u = s.u;
    row.u_arc = s.u_arc;
    row.u_g = s.u_g;
    row.s_h = s.s_h;
    row.rules = s.rule_count;
    row.v_hat = s.v_hat;
    row.det_g = s.det_g;
    row.log_det_g = s.log_det_g;
    row.gain_psi_norm = s.gain_psi_norm;
    row.a1 = s.alpha[0];
    row.a2 = s.alpha[1];
    row.a3 = s.alpha[2];
    if (!s.events.empty() || s.vigilance != VigilanceCase::I) row.event = s.event_label();
  });
  res.gain_resets = ctl.smc().gain_resets;
  res.lyapunov_increases = ctl.lyapunov().increases;
  return res;
}

}  // namespace gctl
