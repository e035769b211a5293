#include "activelab/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace activelab {

void LearnerConfig::validate() const {
  if (d < 2) throw std::invalid_argument("LearnerConfig: d must be >= 2");
  if (T < 4) throw std::invalid_argument("LearnerConfig: T must be >= 4");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("LearnerConfig: delta must be in (0,1)");
  if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("LearnerConfig: r must be in (0, 1/2)");
  if (erm_budget < 1) throw std::invalid_argument("LearnerConfig: erm_budget must be >= 1");
  if (margin_rule.kind == MarginRule::Kind::LogConcave && !(margin_rule.c1 > 0.0))
    throw std::invalid_argument("LearnerConfig: c1 must be > 0");
}

std::int64_t Schedule::total_labels() const {
  std::int64_t s = 0;
  for (auto n : n_per_round) s += n;
  return s;
}

Schedule make_schedule(const LearnerConfig& cfg) {
  cfg.validate();
  Schedule s;
  s.E = std::max(1, static_cast<int>(std::floor(std::log2(static_cast<double>(cfg.T)) / 2.0)));
  const std::int64_t n = cfg.T / s.E;
  s.n_per_round.assign(static_cast<std::size_t>(s.E), n);
  s.n_per_round.back() += cfg.T - n * s.E;  // remainder goes to the last round

  s.beta.resize(static_cast<std::size_t>(s.E) + 1);
  s.beta[0] = kPi;
  for (int k = 1; k <= s.E; ++k)
    s.beta[static_cast<std::size_t>(k)] = cfg.r * s.beta[static_cast<std::size_t>(k - 1)];

  s.b.resize(static_cast<std::size_t>(s.E));
  s.b[0] = std::numeric_limits<double>::infinity();
  const double log2_inv_r = std::log2(1.0 / cfg.r);
  const double log2_t = std::log2(static_cast<double>(cfg.T));
  for (int k = 2; k <= s.E; ++k) {
    const double beta_prev = s.beta[static_cast<std::size_t>(k - 1)];
    s.b[static_cast<std::size_t>(k - 1)] =
        cfg.margin_rule.kind == MarginRule::Kind::Uniform
            ? (2.0 * beta_prev / std::sqrt(static_cast<double>(cfg.d))) *
                  std::sqrt(s.E * (1.0 + log2_inv_r))
            : cfg.margin_rule.c1 * beta_prev * log2_t;
  }
  return s;
}

double empirical_error(const UnitVector& w, std::span<const LabeledPoint> data) {
  if (data.empty()) throw std::invalid_argument("empirical_error: empty data");
  std::int64_t errors = 0;
  for (const auto& p : data) errors += sign_nonneg(dot(p.x, w.span())) != p.y;
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

double angular_distance(double a, double b) {
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, 2.0 * kPi - d);
}

// Planar view of a labeled point: w(psi) . x = a cos(psi) + b sin(psi).
struct SweepPoint {
  double a, b;
  int y;
};

std::int64_t count_errors_at(double psi, std::span<const SweepPoint> pts) {
  const double c = std::cos(psi), s = std::sin(psi);
  std::int64_t errors = 0;
  for (const auto& p : pts) errors += sign_nonneg(p.a * c + p.b * s) != p.y;
  return errors;
}

struct SweepSolution {
  double psi = 0;
  std::int64_t errors = 0;
};

// Exact minimizer of the 0/1 error over angles psi, restricted to
// feasible(psi).  The error is piecewise constant with breakpoints where
// some point's margin changes sign; every arc between breakpoints is probed
// at its midpoint, plus caller-supplied extra candidates.  Ties are broken
// by tiebreak_cost, then by psi.
std::optional<SweepSolution> angular_erm_sweep(
    std::span<const SweepPoint> pts, std::span<const double> extras,
    const std::function<bool(double)>& feasible,
    const std::function<double(double)>& tiebreak_cost) {
  struct Event {
    double angle;
    int delta;
  };
  std::vector<Event> events;
  events.reserve(2 * pts.size());
  for (const auto& p : pts) {
    if (p.a == 0.0 && p.b == 0.0) continue;  // constant contribution
    const double phi = std::atan2(p.b, p.a);
    // Error arc (m - pi/2, m + pi/2) with m opposite to the label; arc
    // endpoints never serve as candidates, so open/closed does not matter.
    const double m = p.y > 0 ? phi + kPi : phi;
    events.push_back({wrap_angle(m - kPi / 2.0), +1});
    events.push_back({wrap_angle(m + kPi / 2.0), -1});
  }
  std::sort(events.begin(), events.end(),
            [](const Event& lhs, const Event& rhs) { return lhs.angle < rhs.angle; });

  std::optional<SweepSolution> best;
  double best_cost = 0.0;
  auto consider = [&](double psi, std::int64_t errors) {
    psi = wrap_angle(psi);
    if (!feasible(psi)) return;
    const double cost = tiebreak_cost(psi);
    if (!best || errors < best->errors ||
        (errors == best->errors &&
         (cost < best_cost - 1e-15 ||
          (std::abs(cost - best_cost) <= 1e-15 && psi < best->psi)))) {
      best = SweepSolution{psi, errors};
      best_cost = cost;
    }
  };

  if (!events.empty()) {
    // Unique event angles with aggregated deltas.
    std::vector<double> angles;
    std::vector<int> deltas;
    for (const auto& e : events) {
      if (!angles.empty() && e.angle == angles.back()) {
        deltas.back() += e.delta;
      } else {
        angles.push_back(e.angle);
        deltas.push_back(e.delta);
      }
    }
    const std::size_t m = angles.size();
    auto midpoint = [&](std::size_t i) {
      const double next = i + 1 < m ? angles[i + 1] : angles[0] + 2.0 * kPi;
      return wrap_angle(0.5 * (angles[i] + next));
    };
    std::int64_t count = count_errors_at(midpoint(0), pts);
    consider(midpoint(0), count);
    for (std::size_t i = 1; i < m; ++i) {
      count += deltas[i];
      consider(midpoint(i), count);
    }
  }
  for (double psi : extras) consider(psi, count_errors_at(psi, pts));
  return best;
}

UnitVector erm_zero_one_2d(std::span<const LabeledPoint> data, const UnitVector& center,
                           double beta) {
  const double beta_eff = std::min(beta, kPi);
  const bool unconstrained = beta >= kPi;
  const double psi_c = std::atan2(center[1], center[0]);

  std::vector<SweepPoint> pts;
  pts.reserve(data.size());
  for (const auto& p : data) pts.push_back({p.x[0], p.x[1], p.y});

  // Candidates are the arc midpoints plus, under a proper cone, its two
  // endpoints: midpoints realize every error level attained strictly inside
  // the cone and keep data points off the candidate hyperplanes.
  std::vector<double> extras;
  if (!unconstrained) {
    extras.push_back(psi_c - beta_eff);
    extras.push_back(psi_c + beta_eff);
  }
  auto feasible = [&](double psi) {
    return unconstrained || angular_distance(psi, psi_c) <= beta_eff + 1e-12;
  };
  auto tiebreak = [&](double psi) { return angular_distance(psi, psi_c); };

  const auto sol = angular_erm_sweep(pts, extras, feasible, tiebreak);
  if (!sol) return center;  // no events (all-zero data) and no endpoints
  return UnitVector({std::cos(sol->psi), std::sin(sol->psi)});
}

std::int64_t count_errors(const UnitVector& w, std::span<const LabeledPoint> data) {
  std::int64_t errors = 0;
  for (const auto& p : data) errors += sign_nonneg(dot(p.x, w.span())) != p.y;
  return errors;
}

UnitVector erm_zero_one_highdim(std::span<const LabeledPoint> data, const UnitVector& center,
                                double beta, const LearnerConfig& cfg, RandomSource& rng) {
  const double beta_eff = std::min(beta, kPi);
  const bool unconstrained = beta >= kPi;
  const double cos_beta = std::cos(beta_eff);

  UnitVector best = center;
  std::int64_t best_err = count_errors(best, data);
  double best_angle = 0.0;  // angle to center
  for (int i = 0; i < cfg.erm_budget; ++i) {
    UnitVector cand = sample_in_cone(center, beta_eff, rng);
    const std::int64_t err = count_errors(cand, data);
    const double ang = angle(cand, center);
    if (err < best_err || (err == best_err && ang < best_angle - 1e-12)) {
      best = std::move(cand);
      best_err = err;
      best_angle = ang;
    }
  }

  // Local refinement: exact sweeps in random 2-planes through the incumbent,
  // intersected with the cone, until a full round yields no improvement.
  const int planes_per_round = std::clamp(2 * cfg.d, 4, 16);
  const int max_rounds = 16;
  std::vector<SweepPoint> pts(data.size());
  for (int round = 0; round < max_rounds; ++round) {
    bool improved = false;
    for (int p = 0; p < planes_per_round; ++p) {
      const UnitVector u = orthonormal_tangent(best, rng);
      for (std::size_t i = 0; i < data.size(); ++i)
        pts[i] = {dot(data[i].x, best.span()), dot(data[i].x, u.span()), data[i].y};

      const double a_c = dot(best.span(), center.span());
      const double b_c = dot(u.span(), center.span());
      auto cos_to_center = [&](double psi) {
        return std::clamp(a_c * std::cos(psi) + b_c * std::sin(psi), -1.0, 1.0);
      };
      auto feasible = [&](double psi) {
        return unconstrained || cos_to_center(psi) >= cos_beta - 1e-12;
      };
      auto tiebreak = [&](double psi) { return std::acos(cos_to_center(psi)); };

      std::vector<double> extras;
      if (!unconstrained) {
        // In-plane angles where the cone boundary is crossed.
        const double radius = std::hypot(a_c, b_c);
        if (radius >= std::abs(cos_beta)) {
          const double psi0 = std::atan2(b_c, a_c);
          const double dpsi = std::acos(std::clamp(cos_beta / radius, -1.0, 1.0));
          extras.push_back(psi0 - dpsi);
          extras.push_back(psi0 + dpsi);
        }
      }

      const auto sol = angular_erm_sweep(pts, extras, feasible, tiebreak);
      if (!sol) continue;
      if (sol->errors < best_err ||
          (sol->errors == best_err && tiebreak(sol->psi) < best_angle - 1e-12)) {
        best = rotate_toward(best, u, sol->psi);
        best_err = sol->errors;
        best_angle = angle(best, center);
        improved = true;
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace

UnitVector erm_zero_one(std::span<const LabeledPoint> data, const UnitVector& center,
                        double beta, const LearnerConfig& cfg, RandomSource& rng) {
  if (data.empty()) throw std::invalid_argument("erm_zero_one: empty data");
  if (!(beta > 0.0)) throw std::invalid_argument("erm_zero_one: beta must be > 0");
  if (center.dim() != static_cast<std::size_t>(cfg.d))
    throw std::invalid_argument("erm_zero_one: center dimension mismatch");
  for (const auto& p : data)
    if (p.x.size() != static_cast<std::size_t>(cfg.d))
      throw std::invalid_argument("erm_zero_one: data dimension mismatch");

  if (cfg.d == 2) return erm_zero_one_2d(data, center, beta);
  return erm_zero_one_highdim(data, center, beta, cfg, rng);
}

StreamBatch draw_labeled_stream(const DataDistribution& dist, const LabelOracle& oracle,
                                std::int64_t n,
                                const std::function<bool(std::span<const double>)>& accept,
                                RandomSource& rng, std::int64_t max_consecutive_rejects,
                                const std::string& context) {
  StreamBatch batch;
  batch.data.reserve(static_cast<std::size_t>(n));
  std::int64_t consecutive_rejects = 0;
  while (std::ssize(batch.data) < n) {
    Vec x = sample(dist, rng);
    ++batch.stream_seen;
    if (!accept(x)) {
      if (++consecutive_rejects >= max_consecutive_rejects)
        throw std::runtime_error(context + ": stream stalled after " +
                                 std::to_string(consecutive_rejects) +
                                 " consecutive rejections");
      continue;
    }
    consecutive_rejects = 0;
    const int y = oracle.draw_label(x, rng);
    batch.data.push_back({std::move(x), y});
  }
  return batch;
}

std::int64_t RunTrace::total_labels() const {
  std::int64_t s = 0;
  for (const auto& r : rounds) s += r.labels_used;
  return s;
}

ActiveRunResult run_margin_active(const LearnerConfig& cfg, const LabelOracle& oracle,
                                  const DataDistribution& dist, RandomSource rng,
                                  const UnitVector* truth) {
  cfg.validate();
  if (oracle.dim() != cfg.d) throw std::invalid_argument("run_margin_active: oracle dimension mismatch");
  if (dist.d != cfg.d) throw std::invalid_argument("run_margin_active: distribution dimension mismatch");
  if (cfg.margin_rule.kind == MarginRule::Kind::Uniform &&
      dist.kind != DataDistribution::Kind::UniformBall)
    throw std::invalid_argument("run_margin_active: the uniform margin rule requires the uniform ball");

  const Schedule sched = make_schedule(cfg);
  RandomSource algo_rng = rng.split(0);
  RandomSource stream_rng = rng.split(1);

  UnitVector w = random_unit_vector(cfg.d, algo_rng);
  ActiveRunResult result{w, {}};
  result.trace.rounds.reserve(static_cast<std::size_t>(sched.E));

  for (int k = 1; k <= sched.E; ++k) {
    const double beta_prev = sched.beta[static_cast<std::size_t>(k - 1)];
    const double b_prev = sched.b[static_cast<std::size_t>(k - 1)];
    const std::int64_t n_k = sched.n_per_round[static_cast<std::size_t>(k - 1)];

    auto accept = [&](std::span<const double> x) { return margin_test(x, w, b_prev); };
    const StreamBatch batch = draw_labeled_stream(dist, oracle, n_k, accept, stream_rng,
                                                  10000 * n_k, "round " + std::to_string(k));

    UnitVector w_next = erm_zero_one(batch.data, w, beta_prev, cfg, algo_rng);
    const double step = angle(w_next, w);
    if (step > beta_prev + 1e-9)
      throw std::logic_error("run_margin_active: fit left the hypothesis cone (bug)");

    RoundRecord rec;
    rec.k = k;
    rec.beta_prev = beta_prev;
    rec.b_prev = b_prev;
    rec.labels_used = n_k;
    rec.stream_seen = batch.stream_seen;
    rec.emp_err = empirical_error(w_next, batch.data);
    rec.angle_step = step;
    if (truth != nullptr) {
      rec.angle_to_truth = angle(w_next, *truth);
      rec.has_angle = true;
    }
    result.trace.rounds.push_back(rec);
    w = std::move(w_next);
  }
  result.w = std::move(w);
  return result;
}

UnitVector run_passive(const LearnerConfig& cfg, const LabelOracle& oracle,
                       const DataDistribution& dist, RandomSource rng) {
  cfg.validate();
  if (oracle.dim() != cfg.d) throw std::invalid_argument("run_passive: oracle dimension mismatch");
  if (dist.d != cfg.d) throw std::invalid_argument("run_passive: distribution dimension mismatch");

  RandomSource algo_rng = rng.split(0);
  RandomSource data_rng = rng.split(1);
  const UnitVector center = random_unit_vector(cfg.d, algo_rng);
  const StreamBatch batch =
      draw_labeled_stream(dist, oracle, cfg.T, [](std::span<const double>) { return true; },
                          data_rng, std::numeric_limits<std::int64_t>::max(), "passive");
  return erm_zero_one(batch.data, center, kPi, cfg, algo_rng);
}

bool uniform_rule_in_theorem_regime(const LearnerConfig& cfg) {
  return cfg.margin_rule.kind == MarginRule::Kind::Uniform && cfg.d >= 4 && cfg.T >= 4;
}

bool alpha_in_adaptive_range(double alpha, double r) {
  return alpha >= 1.0 / (1.0 + std::log2(1.0 / r));
}

}  // namespace activelab
