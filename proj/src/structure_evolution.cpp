#include "gctl/structure_evolution.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gctl {

namespace {

double log_volume_of(const Mat& inv_disp, const std::string& what) {
  Eigen::LLT<Mat> llt(inv_disp);
  if (llt.info() != Eigen::Success) throw NumericalError(what + ": inverse dispersion is not SPD");
  return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double log_volume(const RuleBase& rb, std::size_t i) {
  return log_volume_of(rb.rule(i).inv_dispersion, "rule " + std::to_string(i));
}

double log_sum_exp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

void symmetrize(Mat& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

void EvolutionConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractViolation("evolution config: " + msg); };
  if (!(rho_a > 0.0 && rho_a < 1.0)) fail("rho_a must lie in (0, 1)");
  if (!(rho_b >= 1e-4 && rho_b <= 0.1)) fail("rho_b must lie in [1e-4, 0.1]");
  if (!(delta >= 1e-4 && delta <= 1.0)) fail("delta must lie in [1e-4, 1]");
  if (!(k_fs > 0.0)) fail("k_fs must be positive");
  if (!(k_win > 1.0)) fail("k_win must exceed 1");
  if (!(epsilon_complete > 0.0 && epsilon_complete < 1.0)) fail("epsilon must lie in (0, 1)");
  if (!(ds_threshold > 0.0 && ds_threshold < 1.0)) fail("ds_threshold must lie in (0, 1)");
  if (!(min_volume_ratio > 0.0 && min_volume_ratio <= 1.0)) fail("min_volume_ratio must lie in (0, 1]");
}

double datum_significance(const RuleBase& rb, const Mat& candidate_inv_disp) {
  if (rb.empty()) throw ContractViolation("datum significance: empty rule base");
  const double k = static_cast<double>(rb.input_dim());
  std::vector<double> logs;
  logs.reserve(rb.size() + 1);
  for (std::size_t i = 0; i < rb.size(); ++i) logs.push_back(k * log_volume(rb, i));
  const double cand = k * log_volume_of(candidate_inv_disp, "candidate rule");
  logs.push_back(cand);
  return std::exp(cand - log_sum_exp(logs));
}

double error_weighted_significance(const RuleBase& rb, const Mat& candidate_inv_disp,
                                   double e_rn) {
  return std::abs(e_rn) * datum_significance(rb, candidate_inv_disp);
}

GrowthState update_error_stats(GrowthState gs, double e_rn) {
  const std::size_t n = gs.sample_count + 1;
  if (n == 1) {
    gs.err_mean = e_rn;
    gs.err_var = 0.0;
  } else {
    const double nn = static_cast<double>(n);
    const double prev_mean = gs.err_mean;
    const double d = e_rn - prev_mean;
    gs.err_mean = ((nn - 1.0) / nn) * prev_mean + e_rn / nn;
    gs.err_var = ((nn - 1.0) / nn) * (gs.err_var + d * d / nn);
  }
  gs.sample_count = n;
  return gs;
}

bool should_grow(const GrowthState& gs, double ds_plain, double ds_weighted,
                 bool trend_positive) {
  return trend_positive ? ds_plain >= gs.ds_threshold : ds_weighted >= gs.ds_threshold;
}

double consequent_magnitude(const FuzzyRule& rule) { return rule.consequent.cwiseAbs().sum(); }

double rule_significance(const RuleBase& rb, std::size_t rule_index,
                         double consequent_magnitude) {
  if (rule_index >= rb.size())
    throw ContractViolation("rule significance: index " + std::to_string(rule_index) +
                            " out of range");
  const double k = static_cast<double>(rb.input_dim());
  std::vector<double> logs;
  logs.reserve(rb.size());
  for (std::size_t i = 0; i < rb.size(); ++i) logs.push_back(k * log_volume(rb, i));
  return consequent_magnitude * std::exp(logs[rule_index] - log_sum_exp(logs));
}

std::vector<std::size_t> prune_rules(RuleBase& rb, const EvolutionConfig& cfg) {
  if (rb.empty()) throw ContractViolation("prune: empty rule base");
  std::vector<std::size_t> pruned;
  if (rb.size() == 1) return pruned;

  std::vector<double> score(rb.size());
  for (std::size_t i = 0; i < rb.size(); ++i)
    score[i] = rule_significance(rb, i, consequent_magnitude(rb.rule(i)));

  const double k_e = cfg.k_e();
  for (std::size_t i = 0; i < rb.size(); ++i)
    if (score[i] <= k_e) pruned.push_back(i);

  if (pruned.size() == rb.size()) {
    // Keep the most significant rule.
    const auto keep = static_cast<std::size_t>(
        std::distance(score.begin(), std::max_element(score.begin(), score.end())));
    pruned.erase(std::find(pruned.begin(), pruned.end(), keep));
  }
  for (auto it = pruned.rbegin(); it != pruned.rend(); ++it) rb.remove(*it);
  return pruned;
}

Vec posteriors(const RuleBase& rb, const Vec& z) {
  if (rb.empty()) throw ContractViolation("posteriors: empty rule base");
  double total_support = 0.0;
  for (const auto& r : rb.rules()) total_support += static_cast<double>(r.support);

  std::vector<double> logp(rb.size());
  for (std::size_t i = 0; i < rb.size(); ++i) {
    const auto& r = rb.rule(i);
    const double log_lik =
        -0.5 * (std::log(2.0 * std::numbers::pi) + log_volume(rb, i)) - mahalanobis_sq(r, z);
    const double log_prior = total_support > 0.0
                                 ? std::log(static_cast<double>(r.support) / total_support)
                                 : -std::log(static_cast<double>(rb.size()));
    logp[i] = log_lik + log_prior;
  }
  const double norm = log_sum_exp(logp);
  Vec post(static_cast<Eigen::Index>(rb.size()));
  for (std::size_t i = 0; i < rb.size(); ++i)
    post(static_cast<Eigen::Index>(i)) = std::exp(logp[i] - norm);
  return post;
}

Winner select_winner(const RuleBase& rb, const Vec& z) {
  const Vec post = posteriors(rb, z);
  Winner w;
  w.posterior = post(0);
  for (Eigen::Index i = 1; i < post.size(); ++i) {
    if (post(i) > w.posterior) {
      w.index = static_cast<std::size_t>(i);
      w.posterior = post(i);
    }
  }
  return w;
}

VigilanceCase classify_case(double r_win, double v_win, double rho_a, double v_max) {
  const bool covered = r_win >= rho_a;
  const bool compact = v_win <= v_max;
  if (covered) return compact ? VigilanceCase::I : VigilanceCase::III;
  return compact ? VigilanceCase::IV : VigilanceCase::II;
}

void absorb_sample(FuzzyRule& winner, const Vec& z) {
  const double n_old = static_cast<double>(winner.support);
  const double alpha = 1.0 / (n_old + 1.0);
  winner.center += (z - winner.center) / (n_old + 1.0);

  const Vec d = z - winner.center;
  const Vec sd = winner.inv_dispersion * d;
  const double denom = 1.0 + alpha * d.dot(sd);
  winner.inv_dispersion =
      winner.inv_dispersion / (1.0 - alpha) - (alpha / (1.0 - alpha)) * (sd * sd.transpose()) / denom;
  symmetrize(winner.inv_dispersion);
  winner.support += 1;
}

std::size_t shrink_winner(FuzzyRule& winner, const Vec& z, double v_max, double k_win,
                          double min_volume) {
  constexpr std::size_t kMaxSteps = 100000;
  winner.center = z;
  const double target = std::log(std::max(v_max, min_volume));
  const double k = static_cast<double>(z.size());
  double log_v = log_volume_of(winner.inv_dispersion, "winner");
  std::size_t steps = 0;
  // Each step scales det(S) by k_win^-k.
  while (log_v > target && steps < kMaxSteps) {
    winner.inv_dispersion *= k_win;
    log_v -= k * std::log(k_win);
    ++steps;
  }
  return steps;
}

CaseOutcome vigilance_update(RuleBase& rb, const EvolutionConfig& cfg, const Vec& z,
                             std::size_t winner, const GrowthContext& growth) {
  if (winner >= rb.size()) throw ContractViolation("vigilance: winner index out of range");
  CaseOutcome out;
  double total_volume = 0.0;
  for (std::size_t i = 0; i < rb.size(); ++i) total_volume += rule_volume(rb.rule(i), i);
  out.v_max = cfg.rho_b * total_volume;
  out.v_win = rule_volume(rb.rule(winner), winner);
  out.r_win = firing_strength(rb.rule(winner), z);
  out.which = classify_case(out.r_win, out.v_win, cfg.rho_a, out.v_max);

  const auto k = static_cast<Eigen::Index>(rb.input_dim());
  switch (out.which) {
    case VigilanceCase::I:
    case VigilanceCase::IV:
      absorb_sample(rb.rule(winner), z);
      break;
    case VigilanceCase::II: {
      const Mat cand = cfg.k_fs * Mat::Identity(k, k);
      const double ds_plain = datum_significance(rb, cand);
      const double ds_weighted = std::abs(growth.e_rn) * ds_plain;
      if (should_grow(growth.state, ds_plain, ds_weighted, growth.trend_positive)) {
        FuzzyRule fresh;
        fresh.center = z;
        fresh.inv_dispersion = cand;
        fresh.support = 1;
        fresh.consequent = rb.rule(winner).consequent;
        out.created = rb.add(std::move(fresh));
      } else {
        absorb_sample(rb.rule(winner), z);
      }
      break;
    }
    case VigilanceCase::III: {
      const double base_volume = std::pow(cfg.k_fs, -static_cast<double>(k));
      out.shrink_steps = shrink_winner(rb.rule(winner), z, out.v_max, cfg.k_win,
                                       cfg.min_volume_ratio * base_volume);
      break;
    }
  }
  return out;
}

FuzzyRule bootstrap_first_rule(const RuleBase& rb, const Vec& z, const EvolutionConfig& cfg,
                               const Vec& initial_consequent) {
  if (!rb.empty()) throw ContractViolation("bootstrap: rule base is not empty");
  const auto k = static_cast<Eigen::Index>(rb.input_dim());
  if (z.size() != k) throw ContractViolation("bootstrap: input dimension mismatch");
  FuzzyRule r;
  r.center = z;
  r.inv_dispersion = cfg.k_fs * Mat::Identity(k, k);
  r.support = 1;
  r.consequent = initial_consequent.size() == 0 ? Vec::Zero(k + 1) : initial_consequent;
  if (r.consequent.size() != k + 1)
    throw ContractViolation("bootstrap: consequent must have k + 1 entries");
  return r;
}

}  // namespace gctl
