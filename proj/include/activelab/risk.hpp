#pragma once

#include <cstdint>
#include <utility>

#include "activelab/oracle.hpp"

namespace activelab {

struct RiskEstimate {
  double value = 0;
  double std_error = 0;
  std::int64_t n_samples = 0;
};

/// Monte-Carlo excess risk err(w) - err(w*) with w* the oracle's Bayes
/// classifier, via the disagreement-region identity
///   err(w) - err(w*) = E[ 2 |eta(x) - 1/2| * 1{sgn(w.x) != sgn(w*.x)} ],
/// which has strictly lower variance than sampling labels.
RiskEstimate excess_risk_mc(const UnitVector& w, const LabelOracle& oracle,
                            const DataDistribution& dist, std::int64_t n, RandomSource& rng);

/// Closed-form excess risk on the uniform unit disk (d = 2) for a
/// single-hypothesis oracle, as a function of theta = theta(w, w*).
///
/// The disagreement region is two wedges of angle theta and the hyperplane
/// angle |phi| of a point at polar offset u from the w* hyperplane is u for
/// u <= pi/2 and pi - u beyond, so
///   excess(theta) = (2/pi) * int_0^theta wp(phi) dphi              theta <= pi/2,
///   excess(theta) = (2/pi) * [int_0^{pi/2} wp + int_{pi-theta}^{pi/2} wp]  otherwise,
/// evaluated by the power rule below the cap angle and linearly above.
double excess_risk_exact_2d(double theta, const TncParams& params);

/// Largest mu making  mu * theta^(1/(1-alpha)) <= excess(theta)  hold on the
/// grid: the lower envelope constant of the excess-risk noise condition.
struct TncFit {
  double alpha_assumed = 0;
  double mu_hat = 0;
  /// Analytic reference 2 (1-alpha) mu0 for a unit lower density bound; the
  /// fitted envelope on the uniform ball is smaller because each wedge pair
  /// carries angular density 1/pi rather than 1.
  double mu_envelope_claim = 0;
  std::vector<double> theta_grid;
  std::vector<double> excess;
  std::vector<double> std_err;
  std::vector<double> ratio;
};

/// Evaluates the excess risk at planar rotations of the Bayes classifier by
/// each grid angle (closed form on the 2-D uniform disk single-hypothesis
/// case, Monte Carlo otherwise) and fits the envelope constant.
/// The rotation plane is drawn from rng; by rotational symmetry of the
/// uniform ball the fit does not depend on it (up to MC error).
TncFit fit_tnc_mu(const LabelOracle& oracle, const DataDistribution& dist, double alpha,
                  std::span<const double> grid, std::int64_t n_mc, RandomSource& rng);

/// Least-squares slope of log(excess) against log(T).  Requires at least
/// two points, strictly increasing T and strictly positive excess values.
double rate_slope(std::span<const std::pair<double, double>> points);

}  // namespace activelab
