#include "activelab/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace activelab {

namespace {

constexpr std::uint64_t kCodeSeed = 0xC0DEULL;

std::vector<std::uint8_t> first_combination(int d, int omega) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < omega; ++i) w[static_cast<std::size_t>(i)] = 1;
  return w;
}

// Next weight-preserving word in lexicographic order; false when exhausted.
bool next_combination(std::vector<std::uint8_t>& w) {
  const int d = static_cast<int>(w.size());
  // Find the lowest "10" pattern, move the 1 right, compact the ones below it.
  int ones_below = 0;
  for (int i = 0; i + 1 < d; ++i) {
    if (w[static_cast<std::size_t>(i)] == 1 && w[static_cast<std::size_t>(i + 1)] == 0) {
      w[static_cast<std::size_t>(i)] = 0;
      w[static_cast<std::size_t>(i + 1)] = 1;
      for (int j = 0; j < i; ++j) w[static_cast<std::size_t>(j)] = j < ones_below ? 1 : 0;
      return true;
    }
    if (w[static_cast<std::size_t>(i)] == 1) ++ones_below;
  }
  return false;
}

std::vector<std::uint8_t> random_weight_word(int d, int omega, RandomSource& rng) {
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first omega entries become the support.
  for (int i = 0; i < omega; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(d - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<std::uint8_t> w(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < omega; ++i) w[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
  return w;
}

std::size_t size_target(int d) {
  const int bits = static_cast<int>(std::ceil(0.0625 * d));
  return std::size_t{1} << bits;
}

}  // namespace

int hamming_distance(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  int dist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += a[i] != b[i];
  return dist;
}

CodewordSet build_constant_weight_code(int d) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("build_constant_weight_code: d must be even and >= 2");
  CodewordSet code;
  code.d = d;
  code.omega = d / 2;
  code.delta_h = d / 16.0;

  auto admissible = [&](const std::vector<std::uint8_t>& w) {
    for (const auto& v : code.words)
      if (hamming_distance(w, v) < code.delta_h) return false;
    return true;
  };

  if (d < 20) {
    // Full enumeration.  Distinct equal-weight words differ in at least two
    // positions, so for delta_h <= 2 every word is admissible.
    const bool all_admissible = code.delta_h <= 2.0;
    auto w = first_combination(d, code.omega);
    do {
      if (all_admissible || admissible(w)) code.words.push_back(w);
    } while (next_combination(w));
  } else {
    // Randomized greedy with early stop; the target is all the downstream
    // construction needs and C(d, d/2) is far too large to enumerate.
    const std::size_t target = size_target(d);
    RandomSource rng(kCodeSeed + static_cast<std::uint64_t>(d));
    const std::size_t max_attempts = 100000 + 10000 * target;
    for (std::size_t attempt = 0; attempt < max_attempts && code.words.size() < target; ++attempt) {
      auto w = random_weight_word(d, code.omega, rng);
      if (admissible(w)) code.words.push_back(std::move(w));
    }
  }

  const double log2_size = std::log2(static_cast<double>(code.words.size()));
  if (code.words.empty() || log2_size < 0.0625 * d)
    throw std::runtime_error("build_constant_weight_code: size bound not met (bug)");
  return code;
}

PackingSet build_packing(int d, double t, const CodewordSet& code) {
  if (!(t > 0.0 && t < 0.25)) throw std::invalid_argument("build_packing: t must be in (0, 1/4)");
  if (code.d != d) throw std::invalid_argument("build_packing: codeword length mismatch");
  if (code.words.empty()) throw std::invalid_argument("build_packing: empty codeword set");

  PackingSet p;
  p.t = t;
  p.a = 4.0 * t;
  p.z = std::sqrt(d * (1.0 - p.a + p.a * p.a / 2.0));
  p.codewords = code;
  p.hypotheses.reserve(code.words.size());
  for (const auto& z_i : code.words) {
    Vec w(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = (1.0 - p.a * z_i[j]) / p.z;
    p.hypotheses.push_back(std::move(w));
  }
  return p;
}

SeparationReport verify_separation(const PackingSet& p) {
  if (p.size() < 2) throw std::invalid_argument("verify_separation: need at least 2 hypotheses");
  SeparationReport rep;
  rep.min_angle = std::numeric_limits<double>::infinity();
  rep.max_angle = 0.0;

  for (std::size_t i = 0; i < p.size(); ++i) {
    const double n = norm(p.hypotheses[i]);
    if (std::abs(n - 1.0) > UnitVector::kNormTolerance)
      rep.violations.push_back({i, i, n, "unit-norm violation"});
  }

  const double lo = p.t;
  const double hi = 6.5 * p.t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double c = std::clamp(dot(p.hypotheses[i], p.hypotheses[j]), -1.0, 1.0);
      const double theta = std::acos(c);
      rep.min_angle = std::min(rep.min_angle, theta);
      rep.max_angle = std::max(rep.max_angle, theta);
      if (theta < lo || theta > hi)
        rep.violations.push_back({i, j, theta, "angle outside [t, 6.5t]"});
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

double bernoulli_kl(double p_shift, double q_shift) {
  if (!(std::abs(p_shift) <= 0.5 && std::abs(q_shift) <= 0.5))
    throw std::invalid_argument("bernoulli_kl: shifts must lie in [-1/2, 1/2]");
  return bernoulli_kl_laws(0.5 - p_shift, 0.5 - q_shift);
}

double kl_constant(const TncParams& params) {
  return 2.0 * std::pow(13.0, params.exponent()) * params.coefficient();
}

double kl_per_query_bound(const TncParams& params, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("kl_per_query_bound: t must be > 0");
  const double c = kl_constant(params);
  return 8.0 * c * c * std::pow(t, 2.0 * params.exponent());
}

namespace {

// A unit vector at prescribed signed hyperplane angle phi to w:
// x = sin(phi) w + cos(phi) u with u a random tangent.
Vec point_at_band_angle(const UnitVector& w, double phi, RandomSource& rng) {
  const UnitVector u = orthonormal_tangent(w, rng);
  Vec x(w.dim());
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = s * w[i] + c * u[i];
  return x;
}

std::vector<LabelOracle> member_oracles(const std::shared_ptr<const PackingSet>& packing,
                                        const TncParams& params) {
  std::vector<LabelOracle> members;
  members.reserve(packing->size());
  for (std::size_t i = 0; i < packing->size(); ++i)
    members.push_back(LabelOracle::adversarial_member(packing, i, params));
  return members;
}

}  // namespace

KlBudget kl_budget_bound(const TncParams& params, double t, std::int64_t T,
                         const PackingSet& packing, std::int64_t n_samples, RandomSource& rng) {
  if (T < 1) throw std::invalid_argument("kl_budget_bound: T must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("kl_budget_bound: n_samples must be >= 1");

  KlBudget out;
  out.big_c = kl_constant(params);
  out.per_query_bound = kl_per_query_bound(params, t);
  out.total_bound = static_cast<double>(T) * out.per_query_bound;

  auto shared = std::make_shared<const PackingSet>(packing);
  const auto members = member_oracles(shared, params);
  const UnitVector w1(shared->hypotheses[0]);
  const int d = shared->dim();
  const double band = 6.5 * t;

  // The pointwise KL vanishes outside the band |phi(x, w_1)| <= 6.5t, so a
  // uniform sample alone would almost never probe it; draw half the points
  // at controlled band angles.
  double sup = 0.0;
  std::vector<double> etas(members.size());
  for (std::int64_t s = 0; s < n_samples; ++s) {
    Vec x;
    if (s % 2 == 0) {
      x = random_unit_vector(d, rng).coords();
    } else {
      const double phi = (2.0 * rng.uniform() - 1.0) * band * 1.25;
      x = point_at_band_angle(w1, phi, rng);
    }
    for (std::size_t i = 0; i < members.size(); ++i) etas[i] = members[i].eta(x);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < members.size(); ++j) {
        if (i == j || etas[i] == etas[j]) continue;
        sup = std::max(sup, bernoulli_kl_laws(etas[i], etas[j]));
      }
    }
  }
  out.numeric_sup = sup;
  out.numeric_within_bound = sup <= out.per_query_bound + 1e-12;
  return out;
}

LowerBoundCertificate certify(int d, std::int64_t T, const TncParams& params,
                              const CertifyOptions& options) {
  if (d < 2) throw std::invalid_argument("certify: d must be >= 2");
  if (T < 1) throw std::invalid_argument("certify: T must be >= 1");
  if (!(options.eps_margin > 0.0 && options.eps_margin < 0.125))
    throw std::invalid_argument("certify: eps_margin must be in (0, 1/8)");

  LowerBoundCertificate cert{.d = d, .T = T, .params = params};
  cert.d_used = d % 2 == 0 ? d : d + 1;  // odd d padded by one zero coordinate

  const CodewordSet full_code = build_constant_weight_code(cert.d_used);
  const std::size_t m = size_target(cert.d_used);
  if (m < 2 || full_code.words.size() < m)
    throw std::runtime_error("certify: no usable hypothesis family");
  cert.M = m;
  const double ln_m = std::log(static_cast<double>(m));

  CodewordSet code = full_code;
  code.words.resize(m);

  // Largest admissible t: the KL budget condition is monotone in t, so
  // bisect on (0, t_cap].  t_cap keeps t < 1/4 and |eta - 1/2| <= 1/4 on the
  // active band (|phi| <= 13t there, so coefficient * (13t)^exp <= 1/4).
  const double target = (0.125 - options.eps_margin) * ln_m;
  const double small_t_cap =
      std::pow(0.25 / params.coefficient(), 1.0 / params.exponent()) / 13.0;
  const double t_cap = std::min(0.25 * (1.0 - 1e-9), small_t_cap);
  auto admissible = [&](double t) {
    return static_cast<double>(T) * kl_per_query_bound(params, t) <= target;
  };
  double t;
  if (admissible(t_cap)) {
    t = t_cap;
  } else {
    double lo = 0.0, hi = t_cap;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (admissible(mid) ? lo : hi) = mid;
    }
    t = lo;
  }
  if (!(t > 0.0)) throw std::runtime_error("certify: no feasible t");

  cert.t = t;
  cert.rho = t / 2.0;
  const double rate_exp = (1.0 - params.alpha) / (2.0 * params.alpha);
  cert.kappa = t / std::pow(static_cast<double>(cert.d_used) / static_cast<double>(T), rate_exp);
  cert.kl_bound_per_query = kl_per_query_bound(params, t);
  cert.gamma = static_cast<double>(T) * cert.kl_bound_per_query / ln_m;

  auto packing = std::make_shared<const PackingSet>(build_packing(cert.d_used, t, code));

  // Condition 1: pairwise angles >= 2 rho = t (and within the 6.5t window).
  const SeparationReport sep = verify_separation(*packing);
  cert.separation_ok = sep.pass && sep.min_angle >= 2.0 * cert.rho - 1e-15;

  // Condition 2: inside the band every label law is strictly in (0, 1);
  // outside it all members share the anchor branch bit-for-bit.
  const auto members = member_oracles(packing, params);
  const UnitVector w1(packing->hypotheses[0]);
  RandomSource rng(options.seed);
  const std::int64_t n_cont = std::min<std::int64_t>(options.n_samples, 20000);
  bool continuity = true;
  for (std::int64_t s = 0; s < n_cont && continuity; ++s) {
    Vec x;
    if (s % 2 == 0) {
      x = random_unit_vector(cert.d_used, rng).coords();
    } else {
      const double phi = (2.0 * rng.uniform() - 1.0) * 6.5 * t * 1.25;
      x = point_at_band_angle(w1, phi, rng);
    }
    const double phi1 = signed_angle_to(x, w1);
    const double eta1 = members[0].eta(x);
    for (const auto& member : members) {
      const double e = member.eta(x);
      if (std::abs(phi1) > members[0].adversarial_threshold() ? e != eta1
                                                              : !(e > 0.0 && e < 1.0)) {
        continuity = false;
        break;
      }
    }
  }
  cert.continuity_ok = continuity;

  // Condition 3: total KL budget under gamma ln M with gamma < 1/8, plus the
  // sampled-sup cross-check of the analytic per-query bound.
  RandomSource kl_rng = rng.split(1);
  const KlBudget budget = kl_budget_bound(params, t, T, *packing, options.n_samples, kl_rng);
  cert.kl_numeric_sup = budget.numeric_sup;
  cert.kl_ok = budget.numeric_within_bound && budget.total_bound <= target + 1e-12 &&
               cert.gamma < 0.125;

  return cert;
}

}  // namespace activelab
