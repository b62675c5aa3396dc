#include "gctl/plants.hpp"

#include "gctl/errors.hpp"

#include <cmath>

namespace gctl {

void check_finite(const PlantState& s, std::size_t step) {
  bool ok = std::isfinite(s.position) && std::isfinite(s.velocity);
  for (double x : s.extra) ok = ok && std::isfinite(x);
  if (!ok) throw DivergenceError(step, "plant state is not finite");
}

void GustModel::validate() const {
  if (!(peak_velocity >= 0.0)) throw ContractViolation("gust: peak velocity must be >= 0");
  if (!(onset_time >= 0.0)) throw ContractViolation("gust: onset time must be >= 0");
  if (!(duration > 0.0)) throw ContractViolation("gust: duration must be positive");
}

double GustModel::velocity(double t) const {
  if (t < onset_time || t >= onset_time + duration) return 0.0;
  return peak_velocity * std::sin(std::numbers::pi * (t - onset_time) / duration);
}

PlantState step_lti2(const PlantState& state, double u, double dt, const Lti2Params& p,
                     double disturbance_accel) {
  if (!(dt > 0.0)) throw ContractViolation("lti2: dt must be positive");
  const double acc = -2.0 * p.zeta * p.omega_n * state.velocity -
                     p.omega_n * p.omega_n * state.position + p.gain * u - disturbance_accel;
  PlantState next = state;
  next.velocity = state.velocity + dt * acc;
  next.position = state.position + dt * next.velocity;
  return next;
}

PlantState step_hexa_altitude(const PlantState& state, double thrust, const GustModel& gust,
                              double t, double dt, const HexaParams& p) {
  if (!(dt > 0.0)) throw ContractViolation("hexa: dt must be positive");
  const double v = state.velocity;
  const double acc =
      (thrust - p.mass * p.gravity - p.drag_coeff * v * std::abs(v) - gust.force(t)) / p.mass;
  PlantState next = state;
  next.velocity = v + dt * acc;
  next.position = state.position + dt * next.velocity;
  return next;
}

void FlappingParams::validate() const {
  if (!(frequency > 0.0)) throw ContractViolation("flapping: frequency must be positive");
  if (!(dt > 0.0)) throw ContractViolation("flapping: dt must be positive");
}

void WingGeometry::validate() const {
  if (!(mass > 0.0)) throw ContractViolation("wing geometry: mass must be positive");
}

double flapping_angle(const FlappingParams& p, double t) {
  return p.amplitude * std::cos(std::numbers::pi * p.frequency * t);
}

double angle_of_attack(const FlappingParams& p, double omega, double t) {
  return p.mean_aoa - p.pitch_amp * std::sin(omega * t + p.phase);
}

ForcesMoments forces_and_moments(const std::array<Eigen::Vector3d, 4>& wing_forces,
                                 const WingGeometry& geo, const Eigen::Vector3d& dcm_gravity) {
  ForcesMoments fm{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  for (std::size_t i = 0; i < 4; ++i) {
    fm.force += wing_forces[i];
    fm.moment += wing_forces[i].cross(geo.cg - geo.cp[i]);
  }
  fm.force += geo.mass * geo.gravity * dcm_gravity;
  return fm;
}

double hover_lift_coefficient(const WingGeometry& geo, double amplitude, double frequency) {
  return geo.mass * geo.gravity / (4.0 * amplitude * frequency * frequency);
}

double BifwParams::effective_lift_coeff() const {
  return lift_coeff > 0.0 ? lift_coeff : hover_lift_coefficient(geometry);
}

double wing_lift(const BifwParams& p, const FlappingParams& flap) {
  return p.effective_lift_coeff() * flap.amplitude * flap.frequency * flap.frequency;
}

PlantState step_bifw(const PlantState& state, const FlappingParams& flap, const BifwParams& p,
                     const GustModel& gust, double t, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("bifw: dt must be positive");
  flap.validate();
  const double lift = wing_lift(p, flap);
  std::array<Eigen::Vector3d, 4> wings;
  wings.fill(Eigen::Vector3d{0.0, 0.0, lift});
  const ForcesMoments fm = forces_and_moments(wings, p.geometry, p.dcm_gravity);

  // Gust drag only acts from the onset time on.
  const double fz = fm.force.z() - gust.force(t);
  const double acc = fz / p.geometry.mass;

  PlantState next = state;
  next.velocity = state.velocity + dt * acc;
  next.position = state.position + dt * next.velocity;
  const double omega = 2.0 * std::numbers::pi * flap.frequency;
  next.extra = {flapping_angle(flap, t + dt), angle_of_attack(flap, omega, t + dt), acc};
  return next;
}

}  // namespace gctl
