#include "activelab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace activelab {

RiskEstimate excess_risk_mc(const UnitVector& w, const LabelOracle& oracle,
                            const DataDistribution& dist, std::int64_t n, RandomSource& rng) {
  if (n < 1) throw std::invalid_argument("excess_risk_mc: n must be >= 1");
  if (static_cast<int>(w.dim()) != oracle.dim() || dist.d != oracle.dim())
    throw std::invalid_argument("excess_risk_mc: dimension mismatch");

  const UnitVector& w_star = oracle.bayes_classifier();
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Vec x = sample(dist, rng);
    double f = 0.0;
    if (sign_nonneg(dot(x, w.span())) != sign_nonneg(dot(x, w_star.span())))
      f = 2.0 * std::abs(oracle.eta(x) - 0.5);
    sum += f;
    sum_sq += f * f;
  }
  RiskEstimate est;
  est.n_samples = n;
  est.value = sum / static_cast<double>(n);
  const double var =
      n > 1 ? std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) /
                                static_cast<double>(n - 1))
            : 0.0;
  est.std_error = std::sqrt(var / static_cast<double>(n));
  return est;
}

namespace {

// int_0^theta wp(phi) dphi: power rule below the cap angle, linear above.
double wp_integral(double theta, const TncParams& params) {
  const double e = params.exponent();
  const double c = params.coefficient();
  const double cap = params.cap_angle();
  if (theta <= cap) return c * std::pow(theta, e + 1.0) / (e + 1.0);
  return c * std::pow(cap, e + 1.0) / (e + 1.0) + 0.5 * (theta - cap);
}

}  // namespace

double excess_risk_exact_2d(double theta, const TncParams& params) {
  if (!(theta >= 0.0 && theta <= kPi + 1e-12))
    throw std::invalid_argument("excess_risk_exact_2d: theta must be in [0, pi]");
  theta = std::min(theta, kPi);
  if (theta <= kPi / 2.0) return (2.0 / kPi) * wp_integral(theta, params);
  const double half = wp_integral(kPi / 2.0, params);
  return (2.0 / kPi) * (2.0 * half - wp_integral(kPi - theta, params));
}

TncFit fit_tnc_mu(const LabelOracle& oracle, const DataDistribution& dist, double alpha,
                  std::span<const double> grid, std::int64_t n_mc, RandomSource& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fit_tnc_mu: alpha must be in (0,1)");
  if (grid.size() < 1) throw std::invalid_argument("fit_tnc_mu: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= kPi))
      throw std::invalid_argument("fit_tnc_mu: grid angles must lie in (0, pi]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("fit_tnc_mu: grid must be strictly increasing");
  }

  const bool exact = dist.kind == DataDistribution::Kind::UniformBall && dist.d == 2 &&
                     oracle.is_single();
  const UnitVector& w_star = oracle.bayes_classifier();
  const UnitVector tangent = orthonormal_tangent(w_star, rng);
  const double p = 1.0 / (1.0 - alpha);

  TncFit fit;
  fit.alpha_assumed = alpha;
  fit.mu_envelope_claim = 2.0 * (1.0 - alpha) * oracle.params().mu0;
  fit.mu_hat = std::numeric_limits<double>::infinity();
  for (double theta : grid) {
    double excess, err;
    if (exact) {
      excess = excess_risk_exact_2d(theta, oracle.params());
      err = 0.0;
    } else {
      const UnitVector w_theta = rotate_toward(w_star, tangent, theta);
      const RiskEstimate est = excess_risk_mc(w_theta, oracle, dist, n_mc, rng);
      excess = est.value;
      err = est.std_error;
    }
    const double ratio = excess / std::pow(theta, p);
    fit.theta_grid.push_back(theta);
    fit.excess.push_back(excess);
    fit.std_err.push_back(err);
    fit.ratio.push_back(ratio);
    fit.mu_hat = std::min(fit.mu_hat, ratio);
  }
  return fit;
}

double rate_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("rate_slope: need at least 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw std::invalid_argument("rate_slope: T values must be strictly increasing");
    if (!(points[i].second > 0.0))
      throw std::invalid_argument("rate_slope: excess values must be positive");
    sx += std::log(points[i].first);
    sy += std::log(points[i].second);
  }
  const double mx = sx / static_cast<double>(points.size());
  const double my = sy / static_cast<double>(points.size());
  double num = 0, den = 0;
  for (const auto& [t, e] : points) {
    const double dx = std::log(t) - mx;
    num += dx * (std::log(e) - my);
    den += dx * dx;
  }
  return num / den;
}

}  // namespace activelab
