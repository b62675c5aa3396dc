#include "gctl/smc_adaptation.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace gctl {

void SmcConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractViolation("smc config: " + msg); };
  if (!(g0 > 0.0)) fail("g0 must be positive");
  if (!(alpha_initial[0] > 0.0)) fail("alpha_1 must be positive");
  if (!(alpha_target[0] > 0.0)) fail("alpha_1 target must be positive");
  for (double r : alpha_rate)
    if (!(r >= 0.0)) fail("alpha rates must be non-negative");
  if (!(sat_bound > 0.0)) fail("sat_bound must be positive");
}

SmcState SmcState::initial(const SmcConfig& cfg, std::size_t input_dim) {
  SmcState st;
  st.block = input_dim + 1;
  const auto n = static_cast<Eigen::Index>(st.block);
  st.omega = Vec::Zero(n);
  st.gain = cfg.g0 * Mat::Identity(n, n);
  st.alpha = cfg.alpha_initial;
  st.alpha_initial = cfg.alpha_initial;
  st.alpha_target = cfg.alpha_target;
  st.alpha_rate = cfg.alpha_rate;
  st.sat_bound = cfg.sat_bound;
  st.g0 = cfg.g0;
  st.gain_update = cfg.gain_update;
  return st;
}

double sliding_surface(const SmcState& st, double e, double e_dot) {
  const double a1 = st.alpha[0];
  if (!(a1 > 0.0)) throw ContractViolation("sliding surface: alpha_1 must be positive");
  return e + (st.alpha[1] / a1) * e_dot + (st.alpha[2] / a1) * st.err_integral;
}

double auxiliary_control(const SmcState& st, double s_h) {
  return std::clamp(st.alpha[0] * s_h, -st.sat_bound, st.sat_bound);
}

double fuzzy_control(const SmcState& st, const Vec& psi_regressor) {
  if (psi_regressor.size() != st.omega.size())
    throw ContractViolation("fuzzy control: regressor length " +
                            std::to_string(psi_regressor.size()) + " vs omega length " +
                            std::to_string(st.omega.size()));
  return psi_regressor.dot(st.omega);
}

double total_control(double u_arc, double u_g) { return u_arc - u_g; }

AdaptationRates adaptation_rates(const SmcState& st, const Vec& psi_regressor, double s_h) {
  if (psi_regressor.size() != st.omega.size())
    throw ContractViolation("adapt: regressor does not match omega");
  const Vec g_psi = st.gain * psi_regressor;
  return {-st.alpha[0] * g_psi * s_h, -(g_psi * g_psi.transpose())};
}

double log_det_spd(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

SmcState adapt(SmcState st, const Vec& psi_regressor, double s_h, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("adapt: dt must be positive");
  if (psi_regressor.size() != st.omega.size())
    throw ContractViolation("adapt: regressor does not match omega");

  const Vec g_psi = st.gain * psi_regressor;
  if (st.gain_update == GainUpdate::riccati) {
    const double q = psi_regressor.dot(g_psi);
    const Vec k = g_psi / (1.0 + dt * q);  // updated G times psi
    st.gain.noalias() -= dt * k * g_psi.transpose();
    st.omega -= dt * st.alpha[0] * s_h * k;
  } else {
    st.gain.noalias() -= dt * g_psi * g_psi.transpose();
    st.omega -= dt * st.alpha[0] * s_h * g_psi;
  }
  st.gain = 0.5 * (st.gain + st.gain.transpose()).eval();

  if (std::isnan(log_det_spd(st.gain))) {
    const auto n = st.gain.rows();
    st.gain = st.g0 * Mat::Identity(n, n);
    ++st.gain_resets;
  }
  return st;
}

SmcState evolve_alpha(SmcState st, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("evolve_alpha: dt must be positive");
  for (std::size_t m = 0; m < 3; ++m) {
    const double gap = st.alpha_target[m] - st.alpha[m];
    const double step = dt * st.alpha_rate[m];
    if (std::abs(gap) <= step)
      st.alpha[m] = st.alpha_target[m];
    else
      st.alpha[m] += gap > 0.0 ? step : -step;
  }
  st.alpha[0] = std::max(st.alpha[0], st.alpha_initial[0]);
  return st;
}

SmcState resize(const SmcState& st, std::size_t old_rule_count, std::size_t new_rule_count,
                std::span<const std::size_t> indices, std::optional<std::size_t> seed_rule) {
  const auto b = static_cast<Eigen::Index>(st.block);
  if (st.rule_count() != old_rule_count ||
      st.gain.rows() != st.omega.size() || st.gain.cols() != st.omega.size())
    throw ContractViolation("resize: state does not hold " + std::to_string(old_rule_count) +
                            " rules");

  SmcState out = st;
  if (new_rule_count > old_rule_count) {
    if (indices.size() != new_rule_count - old_rule_count)
      throw ContractViolation("resize: grow indices do not match the rule count change");
    for (std::size_t m = 0; m < indices.size(); ++m)
      if (indices[m] != old_rule_count + m)
        throw ContractViolation("resize: grown rules must be appended");
    if (seed_rule && *seed_rule >= old_rule_count)
      throw ContractViolation("resize: seed rule out of range");

    const auto n_old = st.omega.size();
    const auto n_new = static_cast<Eigen::Index>(new_rule_count) * b;
    out.omega.resize(n_new);
    out.omega.head(n_old) = st.omega;
    out.gain = Mat::Zero(n_new, n_new);
    out.gain.topLeftCorner(n_old, n_old) = st.gain;
    for (Eigen::Index r = static_cast<Eigen::Index>(old_rule_count);
         r < static_cast<Eigen::Index>(new_rule_count); ++r) {
      out.omega.segment(r * b, b) =
          seed_rule ? Vec(st.omega.segment(static_cast<Eigen::Index>(*seed_rule) * b, b))
                    : Vec::Zero(b);
      out.gain.block(r * b, r * b, b, b) = st.g0 * Mat::Identity(b, b);
    }
    return out;
  }

  if (old_rule_count - new_rule_count != indices.size())
    throw ContractViolation("resize: prune indices do not match the rule count change");
  std::vector<Eigen::Index> keep;
  for (std::size_t r = 0; r < old_rule_count; ++r) {
    if (std::find(indices.begin(), indices.end(), r) != indices.end()) continue;
    for (Eigen::Index c = 0; c < b; ++c) keep.push_back(static_cast<Eigen::Index>(r) * b + c);
  }
  if (keep.size() != new_rule_count * st.block)
    throw ContractViolation("resize: prune indices are not distinct or out of range");
  const auto n = static_cast<Eigen::Index>(keep.size());
  out.omega.resize(n);
  out.gain.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.omega(i) = st.omega(keep[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j)
      out.gain(i, j) = st.gain(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  return out;
}

LyapunovTrace lyapunov_monitor(const LyapunovTrace& prev, double s_h, double dt) {
  LyapunovTrace next;
  next.s_h = s_h;
  next.v_dot_bound = -1.5 * s_h * s_h;
  next.v = prev.v + dt * next.v_dot_bound;
  next.increases = prev.increases + (next.v > prev.v ? 1 : 0);
  return next;
}

double quadratic_lyapunov(const Vec& omega, const Vec& omega_star, const Mat& gain) {
  const Vec err = omega - omega_star;
  return 0.5 * err.dot(gain.llt().solve(err));
}

}  // namespace gctl
