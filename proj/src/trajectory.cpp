#include "gctl/trajectory.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gctl {

namespace {

double frac(double x) { return x - std::floor(x); }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

TrajectoryKind parse_trajectory_kind(const std::string& s) {
  if (s == "constant") return TrajectoryKind::constant;
  if (s == "step") return TrajectoryKind::step;
  if (s == "multi_step") return TrajectoryKind::multi_step;
  if (s == "square") return TrajectoryKind::square;
  if (s == "sawtooth") return TrajectoryKind::sawtooth;
  if (s == "sine") return TrajectoryKind::sine;
  if (s == "custom_piecewise") return TrajectoryKind::custom_piecewise;
  throw ContractViolation("unknown trajectory kind '" + s + "'");
}

std::string to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::constant: return "constant";
    case TrajectoryKind::step: return "step";
    case TrajectoryKind::multi_step: return "multi_step";
    case TrajectoryKind::square: return "square";
    case TrajectoryKind::sawtooth: return "sawtooth";
    case TrajectoryKind::sine: return "sine";
    case TrajectoryKind::custom_piecewise: return "custom_piecewise";
  }
  return "?";
}

void Trajectory::validate() const {
  if (!(duration > 0.0)) throw ContractViolation("trajectory: duration must be positive");
  const bool periodic = kind == TrajectoryKind::square || kind == TrajectoryKind::sawtooth ||
                        kind == TrajectoryKind::sine;
  if (periodic && !(frequency > 0.0))
    throw ContractViolation("trajectory: " + to_string(kind) + " requires frequency > 0");
  if (kind == TrajectoryKind::custom_piecewise) {
    if (knots.empty()) throw ContractViolation("trajectory: custom_piecewise needs knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (!(knots[i].first > knots[i - 1].first))
        throw ContractViolation("trajectory: knot times must increase");
  }
}

double reference(const Trajectory& traj, double t) {
  if (!(t >= 0.0 && t <= traj.duration))
    throw ContractViolation("reference: t = " + std::to_string(t) + " outside [0, duration]");
  const double w = 2.0 * std::numbers::pi * traj.frequency;
  switch (traj.kind) {
    case TrajectoryKind::constant:
      return traj.offset + traj.amplitude;
    case TrajectoryKind::step:
      return traj.offset + traj.amplitude * unit_step(t - traj.switch_time);
    case TrajectoryKind::multi_step: {
      double r = 0.0;
      for (const auto& [at, inc] : traj.steps) r += inc * unit_step(t - at);
      return r;
    }
    case TrajectoryKind::square:
      return traj.offset + (frac(traj.frequency * t) < 0.5 ? traj.amplitude : -traj.amplitude);
    case TrajectoryKind::sawtooth:
      return traj.offset + traj.amplitude * frac(traj.frequency * t);
    case TrajectoryKind::sine:
      return traj.offset + traj.amplitude * std::sin(w * t);
    case TrajectoryKind::custom_piecewise: {
      const auto& k = traj.knots;
      if (t <= k.front().first) return k.front().second;
      if (t >= k.back().first) return k.back().second;
      const auto it = std::upper_bound(k.begin(), k.end(), t,
                                       [](double x, const auto& p) { return x < p.first; });
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ContractViolation("expected 'time:value' pair, got '" + item + "'");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ContractViolation("malformed pair '" + item + "'");
    }
  }
  return out;
}

}  // namespace gctl
