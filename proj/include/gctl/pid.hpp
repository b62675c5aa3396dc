#pragma once

#include <optional>

namespace gctl {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double u_lo = -1e6;
  double u_hi = 1e6;

  void validate() const;
};

// Positional PID. The integral term is clamped to the output limits, the
// derivative acts on the low-pass filtered error difference.
class PidController {
 public:
  explicit PidController(PidGains gains, double derivative_tau_steps = 5.0);

  double step(double reference, double output, double dt);

  double integral() const { return integral_; }

 private:
  PidGains gains_;
  double blend_;
  double integral_ = 0.0;
  double rate_ = 0.0;
  std::optional<double> prev_error_;
};

}  // namespace gctl
