#pragma once

// Online structure learning for the rule base: datum-significance rule growth,
// extended-rule-significance pruning, Bayesian (GART+) winner selection and the
// four-case vigilance update of premise parameters.

#include "gctl/fuzzy_inference.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gctl {

// How the rule-growth error e_rn is formed.
enum class ErnMode {
  tracking,  // |reference - plant output|
  literal,   // |plant output - controller output|
};

struct EvolutionConfig {
  double rho_a = 0.95;   // vigilance (membership) threshold
  double rho_b = 0.01;   // volume fraction for V_max, in [1e-4, 0.1]
  double delta = 0.001;  // pruning base constant, in [1e-4, 1]
  double k_fs = 2.0;     // new rule inverse dispersion = k_fs * I
  double k_win = 1.1;    // Case III width reduction factor
  double epsilon_complete = 0.5;
  double ds_threshold = 0.1;  // g
  // Case III never narrows a rule below this fraction of the k_fs*I volume.
  double min_volume_ratio = 1e-6;
  ErnMode ern_mode = ErnMode::tracking;

  // Pruning threshold, always 10% of delta.
  double k_e() const { return 0.10 * delta; }

  // Throws ContractViolation on out-of-domain values.
  void validate() const;
};

struct GrowthState {
  double err_mean = 0.0;
  double err_var = 0.0;
  std::size_t sample_count = 0;
  double ds_threshold = 0.1;

  double trend_level() const { return err_mean + err_var; }
};

// det(Sigma_c)^k / (sum_i det(Sigma_i)^k + det(Sigma_c)^k) for a candidate rule,
// evaluated in log space.
double datum_significance(const RuleBase& rb, const Mat& candidate_inv_disp);

// |e_rn| * datum_significance.
double error_weighted_significance(const RuleBase& rb, const Mat& candidate_inv_disp,
                                   double e_rn);

// Running mean/variance of e_rn over the sample count n.
GrowthState update_error_stats(GrowthState gs, double e_rn);

// Rising error trend gates on the plain significance, otherwise on the
// error-weighted one. Threshold comparison is inclusive.
bool should_grow(const GrowthState& gs, double ds_plain, double ds_weighted,
                 bool trend_positive);

// sum_m |a_mi|
double consequent_magnitude(const FuzzyRule& rule);

// magnitude * det(Sigma_i)^k / sum_m det(Sigma_m)^k
double rule_significance(const RuleBase& rb, std::size_t rule_index,
                         double consequent_magnitude);

// Removes every rule whose significance is <= k_e, keeping at least one rule.
// Returns the removed indices (pre-removal numbering), ascending.
std::vector<std::size_t> prune_rules(RuleBase& rb, const EvolutionConfig& cfg);

struct Winner {
  std::size_t index = 0;
  double posterior = 0.0;
};

// Normalized posteriors P(rule_i | z) with likelihood (2 pi V_i)^-1/2 exp(-d_i^2)
// and prior N_i / sum N.
Vec posteriors(const RuleBase& rb, const Vec& z);

// Argmax posterior; ties go to the lowest index.
Winner select_winner(const RuleBase& rb, const Vec& z);

enum class VigilanceCase { I = 1, II = 2, III = 3, IV = 4 };

VigilanceCase classify_case(double r_win, double v_win, double rho_a, double v_max);

// Inputs Case II needs to decide on rule growth.
struct GrowthContext {
  GrowthState state;
  double e_rn = 0.0;
  bool trend_positive = false;
};

struct CaseOutcome {
  VigilanceCase which = VigilanceCase::I;
  double r_win = 0.0;
  double v_win = 0.0;
  double v_max = 0.0;
  std::optional<std::size_t> created;  // index of a rule added in Case II
  std::size_t shrink_steps = 0;        // Case III iterations
};

// Moves the winner toward z and applies the rank-one inverse-dispersion update
// with alpha = 1 / (N + 1); N += 1.
void absorb_sample(FuzzyRule& winner, const Vec& z);

// Recenters the winner on z and narrows it by k_win until its volume is at or
// below v_max (or the volume floor). Returns the number of narrowing steps.
std::size_t shrink_winner(FuzzyRule& winner, const Vec& z, double v_max, double k_win,
                          double min_volume);

// Dispatches exactly one of Cases I-IV for the winning rule and applies it.
// A rule created in Case II copies the winner's consequent.
CaseOutcome vigilance_update(RuleBase& rb, const EvolutionConfig& cfg, const Vec& z,
                             std::size_t winner, const GrowthContext& growth);

// First rule of an empty base: center z, inverse dispersion k_fs * I, support 1.
FuzzyRule bootstrap_first_rule(const RuleBase& rb, const Vec& z, const EvolutionConfig& cfg,
                               const Vec& initial_consequent);

}  // namespace gctl
