#include "gctl/g_controller.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gctl {

void GControllerConfig::validate() const {
  evolution.validate();
  smc.validate();
  if (!(error_range.lo < error_range.hi) || !(error_rate_range.lo < error_rate_range.hi))
    throw ContractViolation("controller config: input ranges require lo < hi");
  if (!(derivative_tau_steps >= 0.0))
    throw ContractViolation("controller config: derivative_tau_steps must be >= 0");
  if (output_limits && !(output_limits->lo < output_limits->hi))
    throw ContractViolation("controller config: output limits require lo < hi");
}

bool ControlStep::structural_change() const {
  for (const auto& ev : events)
    if (ev.kind != StructuralEventKind::bootstrap) return true;
  return false;
}

std::string ControlStep::event_label() const {
  std::ostringstream os;
  os << "case" << static_cast<int>(vigilance);
  for (const auto& ev : events) {
    switch (ev.kind) {
      case StructuralEventKind::bootstrap: os << ";bootstrap:"; break;
      case StructuralEventKind::grow: os << ";grow:"; break;
      case StructuralEventKind::prune: os << ";prune:"; break;
    }
    os << ev.rule_index;
  }
  return os.str();
}

GController::GController(GControllerConfig cfg)
    : cfg_(std::move(cfg)),
      rules_(2, {cfg_.error_range, cfg_.error_rate_range}),
      smc_(SmcState::initial(cfg_.smc, 2)) {
  cfg_.validate();
  smc_.omega.resize(0);
  smc_.gain.resize(0, 0);
  growth_.ds_threshold = cfg_.evolution.ds_threshold;
  lyap_.v = cfg_.v_hat_initial;
}

void GController::sync_consequents() {
  const auto b = static_cast<Eigen::Index>(smc_.block);
  for (std::size_t i = 0; i < rules_.size(); ++i)
    rules_.rule(i).consequent = smc_.omega.segment(static_cast<Eigen::Index>(i) * b, b);
}

ControlStep GController::step(double reference, double output, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("controller step: dt must be positive");
  ControlStep out;

  const double e = reference - output;
  const double raw_rate = prev_error_ ? (e - *prev_error_) / dt : 0.0;
  const double blend = 1.0 / (1.0 + cfg_.derivative_tau_steps);
  error_rate_ += blend * (raw_rate - error_rate_);
  prev_error_ = e;
  out.e = e;
  out.e_dot = error_rate_;

  Vec raw(2);
  raw << e, error_rate_;
  const Vec z = rules_.normalize(raw);

  if (rules_.empty()) {
    rules_.add(bootstrap_first_rule(rules_, z, cfg_.evolution, Vec()));
    smc_ = SmcState::initial(cfg_.smc, rules_.input_dim());
    out.events.push_back({StructuralEventKind::bootstrap, 0, 1});
  }

  const Inference inf = infer(rules_, z);

  const double integral_before = smc_.err_integral;
  smc_.err_integral += e * dt;
  out.s_h = sliding_surface(smc_, e, error_rate_);
  out.u_arc = auxiliary_control(smc_, out.s_h);
  out.u_g = fuzzy_control(smc_, inf.psi_regressor);
  out.u = total_control(out.u_arc, out.u_g);

  bool winding_up = false;
  if (const auto& lim = cfg_.output_limits) {
    winding_up = (out.u > lim->hi && out.s_h > 0.0) || (out.u < lim->lo && out.s_h < 0.0);
    out.saturated = out.u > lim->hi || out.u < lim->lo;
    out.u = std::clamp(out.u, lim->lo, lim->hi);
  }
  if (winding_up) smc_.err_integral = integral_before;

  out.gain_psi_norm = (smc_.gain * inf.psi_regressor).norm();
  smc_ = adapt(std::move(smc_), inf.psi_regressor, winding_up ? 0.0 : out.s_h, dt);
  sync_consequents();

  // Structure evolution.
  const double e_rn = cfg_.evolution.ern_mode == ErnMode::tracking ? std::abs(e)
                                                                   : std::abs(output - out.u);
  const GrowthState before = growth_;
  growth_ = update_error_stats(growth_, e_rn);
  GrowthContext ctx{growth_, e_rn, growth_.trend_level() - before.trend_level() > 0.0};

  const Winner winner = select_winner(rules_, z);
  const std::size_t count_before = rules_.size();
  const CaseOutcome outcome = vigilance_update(rules_, cfg_.evolution, z, winner.index, ctx);
  out.vigilance = outcome.which;
  if (outcome.created) {
    const std::size_t idx = *outcome.created;
    smc_ = resize(smc_, count_before, rules_.size(), std::span(&idx, 1), winner.index);
    out.events.push_back({StructuralEventKind::grow, idx, rules_.size()});
  } else {
    const std::size_t before_prune = rules_.size();
    const auto pruned = prune_rules(rules_, cfg_.evolution);
    if (!pruned.empty()) {
      smc_ = resize(smc_, before_prune, rules_.size(), pruned);
      for (std::size_t idx : pruned)
        out.events.push_back({StructuralEventKind::prune, idx, rules_.size()});
    }
  }

  smc_ = evolve_alpha(std::move(smc_), dt);
  lyap_ = lyapunov_monitor(lyap_, out.s_h, dt);

  out.rule_count = rules_.size();
  out.v_hat = lyap_.v;
  out.log_det_g = log_det_spd(smc_.gain);
  out.det_g = std::exp(out.log_det_g);
  out.alpha = smc_.alpha;

  if (!std::isfinite(out.u) || !std::isfinite(out.s_h))
    throw DivergenceError(steps_, "controller produced a non-finite output");
  ++steps_;
  return out;
}

void GController::inject_rule(FuzzyRule rule) {
  if (rules_.empty()) throw ContractViolation("inject_rule: controller has not bootstrapped");
  const std::size_t before = rules_.size();
  const Vec block = rule.consequent;
  const std::size_t idx = rules_.add(std::move(rule));
  smc_ = resize(smc_, before, rules_.size(), std::span(&idx, 1));
  smc_.omega.segment(static_cast<Eigen::Index>(idx * smc_.block),
                     static_cast<Eigen::Index>(smc_.block)) = block;
}

std::vector<std::size_t> GController::prune_now() {
  const std::size_t before = rules_.size();
  auto pruned = prune_rules(rules_, cfg_.evolution);
  if (!pruned.empty()) smc_ = resize(smc_, before, rules_.size(), pruned);
  return pruned;
}

}  // namespace gctl
