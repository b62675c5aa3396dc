#pragma once

// The self-evolving controller: one instance owns a rule base, the stacked
// SMC state and the structural-learning statistics. Each call to step() runs
//
//   infer -> sliding surface -> controls -> adapt -> structure evolution
//   -> resize -> evolve alpha -> Lyapunov monitor
//
// on the input vector Z = (e, e'), e = reference - output.

#include "gctl/fuzzy_inference.hpp"
#include "gctl/smc_adaptation.hpp"
#include "gctl/structure_evolution.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gctl {

struct GControllerConfig {
  EvolutionConfig evolution;
  SmcConfig smc;
  InputRange error_range{-10.0, 10.0};
  InputRange error_rate_range{-50.0, 50.0};
  double derivative_tau_steps = 5.0;  // low-pass time constant, in control steps
  double v_hat_initial = 0.0;
  // Actuator range for u. While u is clamped and s_H pushes further out, the
  // omega step and the error integral are skipped (G still contracts).
  std::optional<InputRange> output_limits;

  void validate() const;
};

enum class StructuralEventKind { bootstrap, grow, prune };

struct StructuralEvent {
  StructuralEventKind kind;
  std::size_t rule_index;
  std::size_t rule_count;  // after the event
};

struct ControlStep {
  double u = 0.0;
  double u_arc = 0.0;
  double u_g = 0.0;
  double s_h = 0.0;
  double e = 0.0;
  double e_dot = 0.0;
  std::size_t rule_count = 0;
  double v_hat = 0.0;
  double det_g = 0.0;
  double log_det_g = 0.0;
  double gain_psi_norm = 0.0;  // ||G psi|| before the adaptation step
  bool saturated = false;      // u was clamped to the output limits
  Triple alpha{};
  VigilanceCase vigilance = VigilanceCase::I;
  std::vector<StructuralEvent> events;

  bool structural_change() const;
  // e.g. "case2;grow:3" or "case1;prune:0"
  std::string event_label() const;
};

class GController {
 public:
  explicit GController(GControllerConfig cfg);

  ControlStep step(double reference, double output, double dt);

  const RuleBase& rules() const { return rules_; }
  const SmcState& smc() const { return smc_; }
  const GrowthState& growth() const { return growth_; }
  const LyapunovTrace& lyapunov() const { return lyap_; }
  const GControllerConfig& config() const { return cfg_; }

  // Test hook: installs an externally constructed rule (and its omega block).
  void inject_rule(FuzzyRule rule);
  // Runs one pruning pass, resizing omega/G; returns removed indices.
  std::vector<std::size_t> prune_now();

 private:
  void sync_consequents();

  GControllerConfig cfg_;
  RuleBase rules_;
  SmcState smc_;
  GrowthState growth_;
  LyapunovTrace lyap_;
  std::optional<double> prev_error_;
  double error_rate_ = 0.0;
  std::size_t steps_ = 0;
};

}  // namespace gctl
