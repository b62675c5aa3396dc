#pragma once

// Fixed-step simulated plants. Every step function is pure: it reads the prior
// state and returns the next one (semi-implicit Euler: velocity first, then
// position with the new velocity).

#include <Eigen/Dense>

#include <array>
#include <numbers>
#include <vector>

namespace gctl {

struct PlantState {
  double position = 0.0;  // m (altitude for the aerial plants)
  double velocity = 0.0;  // m/s
  std::vector<double> extra;
};

// Throws DivergenceError when any entry is non-finite.
void check_finite(const PlantState& s, std::size_t step);

// ---------------------------------------------------------------------------
// Gust: half-sine velocity pulse starting at onset_time.

struct GustModel {
  double peak_velocity = 40.0;  // m/s
  double onset_time = 2.0;      // s
  double duration = 1.0;        // s
  double force_per_velocity = 0.0;  // N per (m/s); 0 disables the disturbance

  void validate() const;
  double velocity(double t) const;
  // Downward disturbance force.
  double force(double t) const { return force_per_velocity * velocity(t); }
};

// ---------------------------------------------------------------------------
// Second-order LTI test plant: x'' = -2 zeta wn x' - wn^2 x + K u.

struct Lti2Params {
  double zeta = 0.7;
  double omega_n = 2.0;
  double gain = 4.0;
};

PlantState step_lti2(const PlantState& state, double u, double dt,
                     const Lti2Params& p = {}, double disturbance_accel = 0.0);

// ---------------------------------------------------------------------------
// Hexacopter altitude surrogate: z'' = (T - m g - c_d z'|z'| - gust(t)) / m.

struct HexaParams {
  double mass = 1.5;
  double gravity = 9.81;
  double drag_coeff = 0.05;
};

PlantState step_hexa_altitude(const PlantState& state, double thrust, const GustModel& gust,
                              double t, double dt, const HexaParams& p = {});

// ---------------------------------------------------------------------------
// Flapping-wing rigid-body surrogate.

struct FlappingParams {
  double amplitude = std::numbers::pi / 2.0;  // rad
  double frequency = 2.0;                     // Hz
  double mean_aoa = 0.0;                      // rad
  double pitch_amp = 0.0;                     // rad
  double phase = 0.0;                         // rad
  double dt = 0.01;                           // s

  void validate() const;
};

struct WingGeometry {
  Eigen::Vector3d cg{0.0, 0.0, 0.0};
  std::array<Eigen::Vector3d, 4> cp{Eigen::Vector3d{0.08, 0.05, 0.0},
                                    Eigen::Vector3d{-0.08, 0.05, 0.0},
                                    Eigen::Vector3d{0.08, -0.05, 0.0},
                                    Eigen::Vector3d{-0.08, -0.05, 0.0}};
  double mass = 0.1;
  double gravity = 9.81;

  void validate() const;
};

// phi(t) = phi_a cos(pi f t)
double flapping_angle(const FlappingParams& p, double t);

// A_mn - A_p sin(omega t + Psi), with t the accumulated step time.
double angle_of_attack(const FlappingParams& p, double omega, double t);

struct ForcesMoments {
  Eigen::Vector3d force;
  Eigen::Vector3d moment;
};

// M = sum F_i x (CG - CP_i); F = sum F_i + m g dcm_gravity.
ForcesMoments forces_and_moments(const std::array<Eigen::Vector3d, 4>& wing_forces,
                                 const WingGeometry& geo, const Eigen::Vector3d& dcm_gravity);

// Lift constant c_L such that four wings at (amplitude, frequency) carry m g.
double hover_lift_coefficient(const WingGeometry& geo,
                              double amplitude = std::numbers::pi / 2.0,
                              double frequency = 2.0);

struct BifwParams {
  WingGeometry geometry;
  double lift_coeff = 0.0;  // 0 selects the hover calibration
  Eigen::Vector3d dcm_gravity{0.0, 0.0, -1.0};

  double effective_lift_coeff() const;
};

// Per-wing mean vertical force from the stub F_z = c_L phi_a f^2.
double wing_lift(const BifwParams& p, const FlappingParams& flap);

// extra = {flapping angle, angle of attack, net vertical acceleration}.
PlantState step_bifw(const PlantState& state, const FlappingParams& flap, const BifwParams& p,
                     const GustModel& gust, double t, double dt);

}  // namespace gctl
