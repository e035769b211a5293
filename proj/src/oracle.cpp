#include "activelab/oracle.hpp"

#include <cmath>
#include <limits>

#include "activelab/lowerbound.hpp"

namespace activelab {

double wp(double theta_abs, const TncParams& params) {
  if (theta_abs < 0.0) throw std::invalid_argument("wp: negative angle");
  if (theta_abs == 0.0) return 0.0;
  const double raw = params.coefficient() * std::pow(theta_abs, params.exponent());
  return std::min(raw, 0.5);
}

LabelOracle LabelOracle::single_hypothesis(UnitVector w_star, TncParams params) {
  return LabelOracle(std::move(w_star), params);
}

LabelOracle LabelOracle::adversarial_member(std::shared_ptr<const PackingSet> packing,
                                            std::size_t index, TncParams params) {
  if (!packing) throw std::invalid_argument("adversarial_member: null packing");
  if (index >= packing->size()) throw std::invalid_argument("adversarial_member: index out of range");
  LabelOracle o(UnitVector(packing->hypotheses[index]), params);
  o.anchor_ = UnitVector(packing->hypotheses[0]);
  o.packing_ = std::move(packing);
  o.index_ = index;
  o.threshold_ = 6.5 * o.packing_->t;
  return o;
}

const PackingSet& LabelOracle::packing() const {
  if (!packing_) throw std::logic_error("packing: not an adversarial oracle");
  return *packing_;
}

double LabelOracle::eta(std::span<const double> x) const {
  if (is_single()) {
    const double phi = signed_angle_to(x, bayes_);
    return 0.5 + sign_nonneg(phi) * wp(std::abs(phi), params_);
  }
  // Both branches use the same anchor angle, so members of one packing make
  // bit-identical branch decisions at every x.
  const double phi1 = signed_angle_to(x, *anchor_);
  if (std::abs(phi1) <= threshold_) {
    const double phi = signed_angle_to(x, bayes_);
    return 0.5 + sign_nonneg(phi) * wp(std::abs(phi), params_);
  }
  return 0.5 + sign_nonneg(phi1) * wp(std::abs(phi1), params_);
}

int LabelOracle::draw_label(std::span<const double> x, RandomSource& rng) const {
  return rng.uniform() < eta(x) ? +1 : -1;
}

double bernoulli_kl_laws(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("bernoulli_kl_laws: parameters must be in [0,1]");
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double pointwise_kl_gap(const LabelOracle& a, const LabelOracle& b, std::span<const double> x) {
  if (a.dim() != b.dim()) throw std::invalid_argument("pointwise_kl_gap: dimension mismatch");
  const double ea = a.eta(x);
  const double eb = b.eta(x);
  if (ea == eb) return 0.0;
  return bernoulli_kl_laws(ea, eb);
}

}  // namespace activelab
