#include "gctl/fuzzy_inference.hpp"

#include "gctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gctl {

RuleBase::RuleBase(std::size_t input_dim, std::vector<InputRange> input_range)
    : input_dim_(input_dim), input_range_(std::move(input_range)) {
  if (input_dim_ == 0) throw ContractViolation("rule base: input_dim must be positive");
  if (input_range_.size() != input_dim_)
    throw ContractViolation("rule base: one input range per dimension required");
  for (const auto& r : input_range_)
    if (!(r.lo < r.hi)) throw ContractViolation("rule base: input range requires lo < hi");
}

const FuzzyRule& RuleBase::rule(std::size_t i) const {
  if (i >= rules_.size()) throw ContractViolation("rule index out of range: " + std::to_string(i));
  return rules_[i];
}

FuzzyRule& RuleBase::rule(std::size_t i) {
  if (i >= rules_.size()) throw ContractViolation("rule index out of range: " + std::to_string(i));
  return rules_[i];
}

std::size_t RuleBase::add(FuzzyRule rule) {
  const auto k = static_cast<Eigen::Index>(input_dim_);
  if (rule.center.size() != k || rule.inv_dispersion.rows() != k ||
      rule.inv_dispersion.cols() != k || rule.consequent.size() != k + 1)
    throw ContractViolation("rule base: rule dimensions do not match input_dim");
  rules_.push_back(std::move(rule));
  return rules_.size() - 1;
}

void RuleBase::remove(std::size_t i) {
  if (i >= rules_.size()) throw ContractViolation("rule index out of range: " + std::to_string(i));
  rules_.erase(rules_.begin() + static_cast<std::ptrdiff_t>(i));
}

Vec RuleBase::normalize(const Vec& raw) const {
  if (static_cast<std::size_t>(raw.size()) != input_dim_)
    throw ContractViolation("normalize: dimension mismatch");
  Vec z(raw.size());
  for (Eigen::Index m = 0; m < raw.size(); ++m) {
    const auto& r = input_range_[static_cast<std::size_t>(m)];
    z(m) = std::clamp(2.0 * (raw(m) - r.lo) / (r.hi - r.lo) - 1.0, -1.0, 1.0);
  }
  return z;
}

double mahalanobis_sq(const FuzzyRule& rule, const Vec& z) {
  if (z.size() != rule.center.size())
    throw ContractViolation("firing strength: input has dimension " + std::to_string(z.size()) +
                            ", rule has " + std::to_string(rule.center.size()));
  const Vec d = z - rule.center;
  return d.dot(rule.inv_dispersion * d);
}

double firing_strength(const FuzzyRule& rule, const Vec& z) {
  return std::exp(-mahalanobis_sq(rule, z));
}

double consequent_value(const FuzzyRule& rule, const Vec& z) {
  return rule.consequent(0) + rule.consequent.tail(z.size()).dot(z);
}

Inference infer(const RuleBase& rb, const Vec& z) {
  if (rb.empty()) throw ContractViolation("infer: no rules");
  const std::size_t j = rb.size();
  const auto k = static_cast<Eigen::Index>(rb.input_dim());
  if (z.size() != k) throw ContractViolation("infer: dimension mismatch");

  Inference out;
  out.firing.raw.resize(static_cast<Eigen::Index>(j));
  Vec dist(static_cast<Eigen::Index>(j));
  for (std::size_t i = 0; i < j; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    dist(ii) = mahalanobis_sq(rb.rule(i), z);
    const double r = std::exp(-dist(ii));
    out.firing.raw(ii) = r < kFiringFloor ? 0.0 : r;
  }

  const double total = out.firing.raw.sum();
  if (total > 0.0) {
    out.firing.normalized = out.firing.raw / total;
  } else {
    // 0/0 regime: the nearest rule takes all the weight.
    Eigen::Index nearest = 0;
    dist.minCoeff(&nearest);
    out.firing.normalized = Vec::Zero(static_cast<Eigen::Index>(j));
    out.firing.normalized(nearest) = 1.0;
  }

  out.psi_regressor.resize(static_cast<Eigen::Index>(j) * (k + 1));
  for (std::size_t i = 0; i < j; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double psi = out.firing.normalized(ii);
    auto block = out.psi_regressor.segment(ii * (k + 1), k + 1);
    block(0) = psi;
    block.tail(k) = psi * z;
    out.output += psi * consequent_value(rb.rule(i), z);
  }
  return out;
}

double rule_volume(const FuzzyRule& rule, std::size_t rule_index) {
  Eigen::LLT<Mat> llt(rule.inv_dispersion);
  if (llt.info() != Eigen::Success)
    throw NumericalError("rule " + std::to_string(rule_index) +
                         ": inverse dispersion is not positive definite");
  const Vec diag = llt.matrixLLT().diagonal();
  // det(S^-1) = prod(L_ii)^2; accumulate in logs to survive very narrow rules.
  const double log_det_inv = 2.0 * diag.array().log().sum();
  const double v = std::exp(-log_det_inv);
  if (!(v > 0.0) || !std::isfinite(v))
    throw NumericalError("rule " + std::to_string(rule_index) + ": volume out of range");
  return v;
}

}  // namespace gctl
