#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gctl {

enum class TrajectoryKind { constant, step, multi_step, square, sawtooth, sine, custom_piecewise };

TrajectoryKind parse_trajectory_kind(const std::string& s);
std::string to_string(TrajectoryKind k);

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::constant;
  double amplitude = 0.0;  // m
  double frequency = 0.0;  // Hz
  double offset = 0.0;     // m, added to every kind except multi_step/custom
  double switch_time = 0.0;  // s, single step
  // multi_step: (time, increment) pairs, r(t) = sum inc * u(t - time)
  std::vector<std::pair<double, double>> steps;
  // custom_piecewise: (time, value) knots, linear in between, held at the ends
  std::vector<std::pair<double, double>> knots;
  double duration = 100.0;

  void validate() const;
};

// Unit step with u(0) = 1.
inline double unit_step(double t) { return t >= 0.0 ? 1.0 : 0.0; }

// Throws ContractViolation when t lies outside [0, duration].
double reference(const Trajectory& traj, double t);

// "t:v, t:v, ..." -> pairs
std::vector<std::pair<double, double>> parse_pairs(const std::string& s);

}  // namespace gctl
