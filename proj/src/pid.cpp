#include "gctl/pid.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gctl {

void PidGains::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd))
    throw ContractViolation("pid: gains must be finite");
  if (!(u_lo < u_hi)) throw ContractViolation("pid: output limits require lo < hi");
}

PidController::PidController(PidGains gains, double derivative_tau_steps)
    : gains_(gains), blend_(1.0 / (1.0 + derivative_tau_steps)) {
  gains_.validate();
}

double PidController::step(double reference, double output, double dt) {
  const double e = reference - output;
  const double raw_rate = prev_error_ ? (e - *prev_error_) / dt : 0.0;
  rate_ += blend_ * (raw_rate - rate_);
  prev_error_ = e;

  integral_ += e * dt;
  if (gains_.ki != 0.0) {
    const double lo = gains_.u_lo / gains_.ki;
    const double hi = gains_.u_hi / gains_.ki;
    integral_ = std::clamp(integral_, std::min(lo, hi), std::max(lo, hi));
  }
  const double u = gains_.kp * e + gains_.ki * integral_ + gains_.kd * rate_;
  return std::clamp(u, gains_.u_lo, gains_.u_hi);
}

}  // namespace gctl
