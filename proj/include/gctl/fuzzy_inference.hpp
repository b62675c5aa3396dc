#pragma once

// Takagi-Sugeno rule base with multivariate Gaussian antecedents.
//
// Each rule i holds a center, a full inverse dispersion matrix and an affine
// consequent eta_i(z) = a_0i + sum_m a_mi z_m. The model output is the
// firing-weighted average of the consequents.

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace gctl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct FuzzyRule {
  Vec center;          // rule focal point
  Mat inv_dispersion;  // SPD, k x k
  std::size_t support = 0;
  Vec consequent;      // (a_0, a_1..a_k)

  std::size_t dim() const { return static_cast<std::size_t>(center.size()); }
};

struct InputRange {
  double lo = -1.0;
  double hi = 1.0;
};

class RuleBase {
 public:
  RuleBase(std::size_t input_dim, std::vector<InputRange> input_range);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  const std::vector<InputRange>& input_range() const { return input_range_; }
  const std::vector<FuzzyRule>& rules() const { return rules_; }
  const FuzzyRule& rule(std::size_t i) const;
  FuzzyRule& rule(std::size_t i);

  // Appends a rule; returns its index. Checks dimensions.
  std::size_t add(FuzzyRule rule);
  void remove(std::size_t i);

  // Maps a raw input onto [-1, 1]^k using the configured range; values
  // outside the range are clamped to the boundary.
  Vec normalize(const Vec& raw) const;

 private:
  std::size_t input_dim_;
  std::vector<InputRange> input_range_;
  std::vector<FuzzyRule> rules_;
};

struct FiringVector {
  Vec raw;
  Vec normalized;
};

struct Inference {
  double output = 0.0;
  FiringVector firing;
  Vec psi_regressor;  // block i = psi_i * (1, z_1..z_k)
};

// Raw firings below this are flushed to zero.
inline constexpr double kFiringFloor = 1e-300;

// (z - c)^T S^-1 (z - c)
double mahalanobis_sq(const FuzzyRule& rule, const Vec& z);

// exp(-(z - c)^T S^-1 (z - c)), in (0, 1].
double firing_strength(const FuzzyRule& rule, const Vec& z);

// First-order TS output. Throws ContractViolation on an empty base.
Inference infer(const RuleBase& rb, const Vec& z);

// det(Sigma) = 1 / det(Sigma^-1). Throws NumericalError when singular.
double rule_volume(const FuzzyRule& rule, std::size_t rule_index = 0);

// Eta_i(z) = a_0 + a^T z.
double consequent_value(const FuzzyRule& rule, const Vec& z);

}  // namespace gctl
