#pragma once

#include <memory>
#include <optional>

#include "activelab/geometry.hpp"

namespace activelab {

struct PackingSet;  // lowerbound.hpp

/// Noise parameters (alpha, mu0) of the angle-based low-noise condition
///   mu0 * |phi(x, w*)|^(alpha/(1-alpha)) <= |eta(x) - 1/2|.
/// Larger alpha means noisier labels near the decision boundary.
struct TncParams {
  double alpha;
  double mu0;

  TncParams(double alpha_, double mu0_) : alpha(alpha_), mu0(mu0_) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("TncParams: alpha must be in (0,1)");
    if (!(mu0 > 0.0)) throw std::invalid_argument("TncParams: mu0 must be > 0");
  }

  double exponent() const { return alpha / (1.0 - alpha); }

  /// Coefficient of the uncapped branch of the shift function: 2^exp * mu0.
  double coefficient() const { return std::pow(2.0, exponent()) * mu0; }

  /// Angle at which the shift function saturates at 1/2.
  double cap_angle() const { return std::pow(0.5 / coefficient(), 1.0 / exponent()); }

  /// The condition is satisfiable by a probability law only when
  /// mu0 * (pi/2)^exp <= 1/2; callers verifying it empirically should use
  /// feasible parameters.
  bool feasible_on_sphere() const {
    return mu0 * std::pow(kPi / 2.0, exponent()) <= 0.5 + 1e-15;
  }
};

/// Shift function: min{2^(a/(1-a)) * mu0 * theta^(a/(1-a)), 1/2}.
/// Monotone nondecreasing; errors on negative input.
double wp(double theta_abs, const TncParams& params);

/// A conditional label distribution eta(x) = Pr(Y = +1 | X = x).
///
/// SingleHypothesis: eta(x) = 1/2 + sgn(w* . x) * wp(|phi(x, w*)|).
/// AdversarialMember i over a packing {w_1, ..., w_m}:
///   eta(x) = 1/2 + sgn(w_i . x) * wp(|phi(x, w_i)|)  if |phi(x, w_1)| <= 6.5t,
///   eta(x) = 1/2 + sgn(w_1 . x) * wp(|phi(x, w_1)|)  otherwise,
/// so all members agree exactly outside the low-margin band of w_1.
/// Oracles are immutable after construction and safe for concurrent reads.
class LabelOracle {
 public:
  static LabelOracle single_hypothesis(UnitVector w_star, TncParams params);
  static LabelOracle adversarial_member(std::shared_ptr<const PackingSet> packing,
                                        std::size_t index, TncParams params);

  double eta(std::span<const double> x) const;

  /// +1 with probability eta(x), else -1.
  int draw_label(std::span<const double> x, RandomSource& rng) const;

  /// The classifier maximizing pointwise label probability: w* for a single
  /// hypothesis, w_i for adversarial member i.
  const UnitVector& bayes_classifier() const { return bayes_; }

  int dim() const { return static_cast<int>(bayes_.dim()); }
  const TncParams& params() const { return params_; }

  bool is_single() const { return packing_ == nullptr; }
  bool is_adversarial() const { return packing_ != nullptr; }
  std::size_t member_index() const { return index_; }
  const PackingSet& packing() const;

  /// Branch boundary 6.5t, stored at construction so the branch decision is
  /// bit-identical across members of the same packing.
  double adversarial_threshold() const { return threshold_; }

 private:
  LabelOracle(UnitVector bayes, TncParams params) : bayes_(std::move(bayes)), params_(params) {}

  UnitVector bayes_;
  TncParams params_;
  std::shared_ptr<const PackingSet> packing_;
  std::optional<UnitVector> anchor_;  // w_1 of the packing
  std::size_t index_ = 0;
  double threshold_ = 0.0;
};

/// KL divergence (natural log) between the Bernoulli label laws of the two
/// oracles at x.  +infinity if one law is degenerate where the other is not.
double pointwise_kl_gap(const LabelOracle& a, const LabelOracle& b, std::span<const double> x);

/// KL(Bernoulli(p) || Bernoulli(q)) in nats, with the conventions
/// 0*log(0/q) = 0 and p*log(p/0) = +infinity for p > 0.
double bernoulli_kl_laws(double p, double q);

}  // namespace activelab
