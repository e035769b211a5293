#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "activelab/oracle.hpp"

namespace activelab {

struct MarginRule {
  enum class Kind { Uniform, LogConcave };
  Kind kind = Kind::Uniform;
  double c1 = 1.0;  // constant of the log-concave rule b = c1 * beta * log2(T)
};

struct LearnerConfig {
  int d = 2;
  std::int64_t T = 1024;
  double delta = 0.05;
  double r = 0.25;  // per-round shrinkage of the hypothesis cone, in (0, 1/2)
  MarginRule margin_rule;
  int erm_budget = 256;  // candidate count for the approximate d > 2 search

  void validate() const;
};

/// Round schedule: E = floor(log2(T) / 2) rounds, floor(T/E) labels per
/// round with the remainder assigned to the last round, beta_k = r^k * pi,
/// b_0 = +infinity and for k >= 2
///   Uniform:    b_{k-1} = (2 beta_{k-1} / sqrt(d)) sqrt(E (1 + log2(1/r)))
///   LogConcave: b_{k-1} = c1 * beta_{k-1} * log2(T).
struct Schedule {
  int E = 0;
  std::vector<std::int64_t> n_per_round;  // size E
  std::vector<double> beta;               // size E + 1: beta_0 .. beta_E
  std::vector<double> b;                  // size E: b_0 .. b_{E-1}

  std::int64_t total_labels() const;
};

Schedule make_schedule(const LearnerConfig& cfg);

struct LabeledPoint {
  Vec x;
  int y;  // +1 or -1
};

/// Minimizes the empirical 0/1 error (misclassification by sgn(w . x),
/// sgn(0) = +1) over unit vectors within angle beta of `center`.  For d = 2
/// the minimizer is exact: the error as a function of the hypothesis angle
/// is piecewise constant with breakpoints at the data directions +- pi/2,
/// and every arc is probed at its midpoint (plus the cone endpoints), so no
/// data point sits on the returned hyperplane unless forced.  For d > 2 the
/// result is an approximate minimizer: best of cfg.erm_budget cone-sampled
/// candidates, refined by exact sweeps in random 2-planes until no
/// improvement.  Ties are broken toward the candidate closest in angle to
/// the center.
UnitVector erm_zero_one(std::span<const LabeledPoint> data, const UnitVector& center,
                        double beta, const LearnerConfig& cfg, RandomSource& rng);

/// Fraction of data points misclassified by sgn(w . x), sgn(0) = +1.
double empirical_error(const UnitVector& w, std::span<const LabeledPoint> data);

struct RoundRecord {
  int k = 0;
  double beta_prev = 0;  // cone radius used by this round's fit
  double b_prev = 0;     // margin threshold (+infinity in round 1)
  std::int64_t labels_used = 0;
  std::int64_t stream_seen = 0;
  double emp_err = 0;
  double angle_step = 0;      // theta(w_k, w_{k-1}); at most beta_prev
  double angle_to_truth = 0;  // valid only when has_angle
  bool has_angle = false;
};

struct RunTrace {
  std::vector<RoundRecord> rounds;
  std::int64_t total_labels() const;
};

struct ActiveRunResult {
  UnitVector w;
  RunTrace trace;
};

/// Margin-based active learning: E rounds of stream filtering by
/// |w_{k-1} . x| <= b_{k-1}, constrained 0/1-error minimization over the
/// cone of radius beta_{k-1} around w_{k-1}, and geometric cone shrinkage.
/// Queries at most T labels in total.  A round throws (naming itself) after
/// 10^4 * n_k consecutive stream rejections.  `truth`, when supplied, only
/// adds the per-round angle to the trace.
ActiveRunResult run_margin_active(const LearnerConfig& cfg, const LabelOracle& oracle,
                                  const DataDistribution& dist, RandomSource rng,
                                  const UnitVector* truth = nullptr);

/// Baseline: T i.i.d. labeled draws, one unconstrained 0/1-error fit.
UnitVector run_passive(const LearnerConfig& cfg, const LabelOracle& oracle,
                       const DataDistribution& dist, RandomSource rng);

/// Draws labeled points from dist x oracle until n accepted by `accept`,
/// consuming x and label from the same stream in order.  Throws when
/// max_consecutive_rejects stream draws are rejected in a row.
struct StreamBatch {
  std::vector<LabeledPoint> data;
  std::int64_t stream_seen = 0;
};
StreamBatch draw_labeled_stream(const DataDistribution& dist, const LabelOracle& oracle,
                                std::int64_t n,
                                const std::function<bool(std::span<const double>)>& accept,
                                RandomSource& rng, std::int64_t max_consecutive_rejects,
                                const std::string& context);

/// The uniform margin rule's guarantees are stated for d >= 4.
bool uniform_rule_in_theorem_regime(const LearnerConfig& cfg);

/// Noise exponents alpha >= 1 / (1 + log2(1/r)) are covered by the adaptive
/// guarantee; smaller alpha still runs but is out of regime.
bool alpha_in_adaptive_range(double alpha, double r);

}  // namespace activelab
