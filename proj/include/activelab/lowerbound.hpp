#pragma once

#include <cstdint>
#include <string>

#include "activelab/oracle.hpp"

namespace activelab {

/// Binary words of length d with Hamming weight exactly d/2 and pairwise
/// Hamming distance >= d/16.  The size satisfies log2|words| >= 0.0625 d.
struct CodewordSet {
  int d = 0;
  int omega = 0;       // d/2
  double delta_h = 0;  // d/16
  std::vector<std::vector<std::uint8_t>> words;
};

int hamming_distance(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// Greedy construction: for d < 20 enumerate all weight-d/2 words in
/// lexicographic order and accept every word at distance >= d/16 from the
/// accepted set; for d >= 20 draw random weight-d/2 words and stop once
/// 2^ceil(0.0625 d) words are accepted.  Errors if the size bound
/// log2|words| >= 0.0625 d cannot be met (that would indicate a bug: a
/// maximal greedy code meets the counting bound).
CodewordSet build_constant_weight_code(int d);

/// Well-separated hypotheses on the unit sphere:
///   w_i = ((1, ..., 1) - a * z_i) / Z,  a = 4t,  Z = sqrt(d (1 - a + a^2/2)),
/// built from codewords z_i.  Pairwise angles lie in [t, 6.5t] and
/// cos(theta_ij) = (Z^2 - (Delta_H(z_i, z_j) / 2) a^2) / Z^2 exactly.
/// Hypotheses are stored as raw vectors so verification can detect
/// tampering; verify_separation() checks the unit-norm invariant.
struct PackingSet {
  std::vector<Vec> hypotheses;
  double t = 0;
  double a = 0;
  double z = 0;
  CodewordSet codewords;

  int dim() const { return codewords.d; }
  std::size_t size() const { return hypotheses.size(); }
};

/// Requires 0 < t < 1/4.
PackingSet build_packing(int d, double t, const CodewordSet& code);

struct SeparationReport {
  double min_angle = 0;
  double max_angle = 0;
  bool pass = false;
  struct Violation {
    std::size_t i, j;  // j == i for a single-vector (norm) failure
    double value;
    std::string what;
  };
  std::vector<Violation> violations;
};

/// Exhaustive pair check of the separation window [t, 6.5t] plus per-vector
/// unit-norm checks.  Failures are reported, not thrown.
SeparationReport verify_separation(const PackingSet& p);

/// KL(Bernoulli(1/2 - p) || Bernoulli(1/2 - q)) in nats.
/// Requires |p|, |q| <= 1/2; returns +infinity when absolute continuity
/// fails (one law degenerate where the other is not).
double bernoulli_kl(double p_shift, double q_shift);

/// C = 2 * 13^(a/(1-a)) * 2^(a/(1-a)) * mu0: the constant in the per-query
/// KL bound for adversarial families.
double kl_constant(const TncParams& params);

/// Per-query KL bound 8 C^2 t^(2a/(1-a)).
double kl_per_query_bound(const TncParams& params, double t);

struct KlBudget {
  double big_c = 0;
  double per_query_bound = 0;  // 8 C^2 t^(2a/(1-a))
  double total_bound = 0;      // T * per_query_bound
  double numeric_sup = 0;      // sampled sup_x max_{i != j} KL(eta_i(x) || eta_j(x))
  bool numeric_within_bound = false;
};

/// Evaluates the analytic budget and cross-checks it against a sampled
/// sup of the pointwise KL over the packing's members.  Half of the samples
/// are drawn inside the low-margin band of w_1 where the KL is nonzero.
KlBudget kl_budget_bound(const TncParams& params, double t, std::int64_t T,
                         const PackingSet& packing, std::int64_t n_samples, RandomSource& rng);

struct CertifyOptions {
  double eps_margin = 0.01;  // slack inside the gamma < 1/8 condition
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0xA17;
};

/// Numeric certificate that the three standard conditions of the
/// information-theoretic lower-bound argument hold for (d, T, alpha, mu0):
///   1. pairwise separation theta(w_i, w_j) >= 2 rho = t,
///   2. mutual absolute continuity of the label laws,
///   3. T * (per-query KL bound) <= gamma * ln M with gamma < 1/8.
/// log M is taken in natural log, consistent with KL in nats.
struct LowerBoundCertificate {
  int d = 0;       // requested dimension
  int d_used = 0;  // even dimension used (odd d padded by one zero coordinate)
  std::int64_t T = 0;
  TncParams params;
  double t = 0;
  double rho = 0;    // t / 2
  double kappa = 0;  // t / (d_used / T)^((1-alpha)/(2 alpha))
  std::size_t M = 0;
  double kl_bound_per_query = 0;
  double kl_numeric_sup = 0;
  double gamma = 0;  // T * kl_bound_per_query / ln M
  bool separation_ok = false;
  bool continuity_ok = false;
  bool kl_ok = false;

  bool all_ok() const { return separation_ok && continuity_ok && kl_ok; }
};

/// Builds the code and packing for the largest t of the form
/// kappa (d/T)^((1-alpha)/(2 alpha)) that satisfies condition 3 (found by
/// bisection), with t also capped so that |eta - 1/2| <= 1/4 inside the
/// active band and t < 1/4.  The packing uses the first M = 2^ceil(0.0625 d)
/// codewords.
LowerBoundCertificate certify(int d, std::int64_t T, const TncParams& params,
                              const CertifyOptions& options = {});

}  // namespace activelab
