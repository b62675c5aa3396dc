#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gctl {

// One control step of a closed-loop run. Controller-specific columns are
// optional and left blank for controllers that do not produce them.
struct TraceRow {
  double t = 0.0;
  double ref = 0.0;
  double y = 0.0;
  double e = 0.0;
  double u = 0.0;
  std::optional<double> u_arc, u_g, s_h;
  std::optional<std::size_t> rules;
  std::optional<double> v_hat, det_g;
  std::optional<double> a1, a2, a3;
  std::string event;

  // In-memory only.
  std::optional<double> log_det_g;
  std::optional<double> gain_psi_norm;
};

struct SegmentMetrics {
  std::size_t begin = 0;  // row index
  std::size_t end = 0;    // one past the last row
  double start_time = 0.0;
  double from_level = 0.0;
  double to_level = 0.0;
  double amplitude = 0.0;
  std::optional<double> rise_time;      // t90 - t10
  std::optional<double> settling_time;  // relative to start_time
};

struct Summary {
  double rmse = 0.0;
  std::optional<double> rise_time_s;
  std::optional<double> settling_time_s;
  std::optional<double> step_time_s;  // start of the segment the times refer to
  std::optional<std::size_t> final_rule_count;
  double max_abs_u = 0.0;
  std::vector<SegmentMetrics> segments;
};

struct ScenarioResult {
  std::string name;
  std::vector<TraceRow> rows;
  Summary summary;
  std::optional<std::string> failure;  // step-stamped diagnostic on divergence
  std::size_t gain_resets = 0;
  std::size_t lyapunov_increases = 0;

  bool ok() const { return !failure.has_value(); }
};

}  // namespace gctl
