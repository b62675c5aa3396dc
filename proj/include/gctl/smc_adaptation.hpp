#pragma once

// Sliding-mode consequent adaptation for the evolving fuzzy controller.
//
//   s_H   = e + (a2/a1) e' + (a3/a1) int(e)
//   u_ARC = sat(a1 s_H)
//   u_g   = psi^T omega
//   u     = u_ARC - u_g
//   omega' = -a1 G psi s_H,   G' = -G psi psi^T G
//
// omega and G are stacked per rule in the rule-base order, (k + 1) entries per
// rule.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace gctl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using Triple = std::array<double, 3>;

// Discretization of the gain law over one control step.
enum class GainUpdate {
  // G^-1 += dt psi psi^T (matrix inversion lemma); omega uses the updated G.
  riccati,
  // Plain explicit Euler with the pre-step G for both laws.
  euler,
};

struct SmcConfig {
  double g0 = 1000.0;
  Triple alpha_initial{1e-2, 1e-3, 0.0};
  Triple alpha_target{0.5, 0.05, 0.001};
  Triple alpha_rate{0.05, 0.005, 0.0001};  // per second
  double sat_bound = 5.0;
  GainUpdate gain_update = GainUpdate::riccati;

  void validate() const;
};

struct SmcState {
  Vec omega;
  Mat gain;
  Triple alpha{1e-2, 1e-3, 0.0};
  Triple alpha_target{0.5, 0.05, 0.001};
  Triple alpha_rate{0.05, 0.005, 0.0001};
  Triple alpha_initial{1e-2, 1e-3, 0.0};
  double err_integral = 0.0;
  double sat_bound = 5.0;
  double g0 = 1000.0;
  std::size_t block = 3;  // k + 1
  GainUpdate gain_update = GainUpdate::riccati;
  std::size_t gain_resets = 0;

  // One rule worth of state, omega = 0 and G = g0 I.
  static SmcState initial(const SmcConfig& cfg, std::size_t input_dim);

  std::size_t rule_count() const { return static_cast<std::size_t>(omega.size()) / block; }
};

double sliding_surface(const SmcState& st, double e, double e_dot);

// clamp(a1 * s_h, -sat_bound, sat_bound)
double auxiliary_control(const SmcState& st, double s_h);

// psi^T omega
double fuzzy_control(const SmcState& st, const Vec& psi_regressor);

double total_control(double u_arc, double u_g);

struct AdaptationRates {
  Vec omega_dot;
  Mat gain_dot;
};

// Continuous-time right-hand sides at the current state.
AdaptationRates adaptation_rates(const SmcState& st, const Vec& psi_regressor, double s_h);

// One discrete step of the adaptation laws. If G stops being positive definite
// it is reset to g0 I and gain_resets is incremented.
SmcState adapt(SmcState st, const Vec& psi_regressor, double s_h, double dt);

// Linear ramp of each alpha toward its target at its rate; alpha_1 never drops
// below its initial value.
SmcState evolve_alpha(SmcState st, double dt);

// Keeps omega/G conformable with the rule base after a structural change.
// Growth appends blocks (omega copied from seed_rule, or zeros; G extended by
// g0 I). Pruning removes the listed blocks and the matching rows/columns of G.
SmcState resize(const SmcState& st, std::size_t old_rule_count, std::size_t new_rule_count,
                std::span<const std::size_t> indices,
                std::optional<std::size_t> seed_rule = std::nullopt);

struct LyapunovTrace {
  double s_h = 0.0;
  double v = 0.0;            // V-hat, integral surrogate of V(t)
  double v_dot_bound = 0.0;  // -(3/2) s_h^2
  std::size_t increases = 0; // steps where V-hat rose
};

// V-hat(t) = V-hat(t - dt) - (3/2) s_h^2 dt.
LyapunovTrace lyapunov_monitor(const LyapunovTrace& prev, double s_h, double dt);

// 1/2 (omega - omega*)^T G^-1 (omega - omega*); needs a known ideal omega*.
double quadratic_lyapunov(const Vec& omega, const Vec& omega_star, const Mat& gain);

// log det(G) via Cholesky; NaN when G is not positive definite.
double log_det_spd(const Mat& m);

}  // namespace gctl
