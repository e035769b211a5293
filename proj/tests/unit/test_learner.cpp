#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "activelab/learner.hpp"

using namespace activelab;

namespace {

LearnerConfig config_2d(std::int64_t T, double r = 0.25) {
  LearnerConfig cfg;
  cfg.d = 2;
  cfg.T = T;
  cfg.r = r;
  return cfg;
}

const DataDistribution kBall2{DataDistribution::Kind::UniformBall, 2};

LabelOracle oracle_2d(double alpha, double mu0, double angle_of_wstar = 0.3) {
  return LabelOracle::single_hypothesis(
      UnitVector({std::cos(angle_of_wstar), std::sin(angle_of_wstar)}), TncParams(alpha, mu0));
}

// Independent check for the 2-D fit: probe every boundary angle +- eps plus
// the cone endpoints and center, counting errors directly.
std::int64_t brute_force_best_error(std::span<const LabeledPoint> data, const UnitVector& center,
                                    double beta) {
  const double psi_c = std::atan2(center[1], center[0]);
  const double beta_eff = std::min(beta, kPi);
  std::vector<double> candidates = {psi_c, psi_c - beta_eff, psi_c + beta_eff};
  for (const auto& p : data) {
    const double phi = std::atan2(p.x[1], p.x[0]);
    for (double base : {phi - kPi / 2, phi + kPi / 2}) {
      for (double eps : {-1e-7, 1e-7}) candidates.push_back(base + eps);
    }
  }
  auto within_cone = [&](double psi) {
    return std::abs(std::remainder(psi - psi_c, 2 * kPi)) <= beta_eff + 1e-12;
  };
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (double psi : candidates) {
    if (!within_cone(psi)) continue;
    const double c = std::cos(psi), s = std::sin(psi);
    std::int64_t errors = 0;
    for (const auto& p : data) errors += sign_nonneg(p.x[0] * c + p.x[1] * s) != p.y;
    best = std::min(best, errors);
  }
  return best;
}

}  // namespace

TEST_CASE("schedule: round count, label split, shrinkage, margins") {
  LearnerConfig cfg = config_2d(256);
  cfg.d = 4;
  const Schedule s = make_schedule(cfg);
  CHECK(s.E == 4);
  REQUIRE(s.n_per_round.size() == 4);
  for (auto n : s.n_per_round) CHECK(n == 64);
  CHECK(s.total_labels() == 256);

  CHECK(s.beta[0] == kPi);
  CHECK(s.beta[1] == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(s.beta[2] == doctest::Approx(0.19635).epsilon(1e-4));
  CHECK(std::isinf(s.b[0]));
  // b_1 = (2 beta_1 / sqrt(4)) sqrt(4 (1 + log2(4))) = 0.7854 sqrt(12).
  CHECK(s.b[1] == doctest::Approx(2.7207).epsilon(1e-4));

  SUBCASE("log-concave rule: b = c1 beta log2(T)") {
    cfg.margin_rule.kind = MarginRule::Kind::LogConcave;
    cfg.margin_rule.c1 = 0.5;
    const Schedule lc = make_schedule(cfg);
    CHECK(std::isinf(lc.b[0]));
    CHECK(lc.b[1] == doctest::Approx(0.5 * (kPi / 4) * 8.0).epsilon(1e-12));
  }

  SUBCASE("remainder labels go to the last round") {
    cfg.T = 260;  // E = 4, 65 per round
    const Schedule rem = make_schedule(cfg);
    CHECK(rem.total_labels() == 260);
    CHECK(rem.n_per_round.back() == 65);
  }

  CHECK_THROWS_AS(make_schedule(config_2d(3)), std::invalid_argument);
}

TEST_CASE("schedule: budget and geometric shrinkage on random configs") {
  RandomSource rng(47);
  for (int i = 0; i < 1000; ++i) {
    LearnerConfig cfg;
    cfg.d = 2 + static_cast<int>(rng.next_u64() % 15);
    cfg.T = 4 + static_cast<std::int64_t>(rng.next_u64() % 100000);
    cfg.r = 0.01 + 0.48 * rng.uniform();
    cfg.margin_rule.kind =
        rng.uniform() < 0.5 ? MarginRule::Kind::Uniform : MarginRule::Kind::LogConcave;
    const Schedule s = make_schedule(cfg);
    CHECK(s.total_labels() <= cfg.T);
    CHECK(s.E >= 1);
    for (int k = 1; k <= s.E; ++k)
      CHECK(s.beta[static_cast<std::size_t>(k)] ==
            cfg.r * s.beta[static_cast<std::size_t>(k - 1)]);
  }
}

TEST_CASE("2-D fit: separable examples") {
  LearnerConfig cfg = config_2d(1024);
  RandomSource rng(51);

  SUBCASE("single positive point") {
    const std::vector<LabeledPoint> data = {{Vec{1.0, 0.0}, +1}};
    const UnitVector w = erm_zero_one(data, UnitVector({0.0, 1.0}), kPi, cfg, rng);
    CHECK(dot(w.span(), data[0].x) > 0.0);
    CHECK(empirical_error(w, data) == 0.0);
  }

  SUBCASE("one positive, one negative: open-arc solution") {
    const std::vector<LabeledPoint> data = {{Vec{1.0, 0.0}, +1}, {Vec{0.0, 1.0}, -1}};
    const UnitVector w = erm_zero_one(data, UnitVector({1.0, 0.0}), kPi, cfg, rng);
    CHECK(dot(w.span(), data[0].x) > 0.0);
    CHECK(dot(w.span(), data[1].x) < 0.0);
    CHECK(empirical_error(w, data) == 0.0);
  }

  SUBCASE("100 realizable labels are fit with zero error") {
    const UnitVector w0 = random_unit_vector(2, rng);
    std::vector<LabeledPoint> data;
    for (int i = 0; i < 100; ++i) {
      Vec x = sample(kBall2, rng);
      const int y = sign_nonneg(dot(x, w0.span()));
      data.push_back({std::move(x), y});
    }
    const UnitVector w = erm_zero_one(data, random_unit_vector(2, rng), kPi, cfg, rng);
    CHECK(empirical_error(w, data) == 0.0);
  }

  CHECK_THROWS_AS(erm_zero_one({}, UnitVector({1.0, 0.0}), kPi, cfg, rng),
                  std::invalid_argument);
  const std::vector<LabeledPoint> one = {{Vec{1.0, 0.0}, +1}};
  CHECK_THROWS_AS(erm_zero_one(one, UnitVector({1.0, 0.0}), 0.0, cfg, rng),
                  std::invalid_argument);
}

TEST_CASE("2-D fit matches an independent angular probe on noisy data") {
  LearnerConfig cfg = config_2d(1024);
  RandomSource rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 60);
    std::vector<LabeledPoint> data;
    for (int i = 0; i < n; ++i) {
      Vec x = sample(kBall2, rng);
      const int y = rng.uniform() < 0.5 ? +1 : -1;  // adversarially noisy labels
      data.push_back({std::move(x), y});
    }
    const UnitVector center = random_unit_vector(2, rng);
    const double beta = trial % 3 == 0 ? kPi : 0.1 + 2.9 * rng.uniform();
    const UnitVector w = erm_zero_one(data, center, beta, cfg, rng);
    CHECK(angle(w, center) <= std::min(beta, kPi) + 1e-9);
    const auto impl_errors =
        static_cast<std::int64_t>(std::llround(empirical_error(w, data) * n));
    CHECK(impl_errors <= brute_force_best_error(data, center, beta));
  }
}

TEST_CASE("high-dimensional fit: feasibility and quality") {
  LearnerConfig cfg = config_2d(1024);
  cfg.d = 4;
  cfg.erm_budget = 128;
  RandomSource rng(57);
  const DataDistribution ball4{DataDistribution::Kind::UniformBall, 4};

  const UnitVector w0 = random_unit_vector(4, rng);
  std::vector<LabeledPoint> data;
  for (int i = 0; i < 400; ++i) {
    Vec x = sample(ball4, rng);
    const int y = sign_nonneg(dot(x, w0.span()));
    data.push_back({std::move(x), y});
  }

  SUBCASE("wide cone recovers a near-consistent hypothesis") {
    const UnitVector w = erm_zero_one(data, random_unit_vector(4, rng), kPi, cfg, rng);
    CHECK(empirical_error(w, data) <= 0.02);
  }

  SUBCASE("tight cone stays feasible and improves on its center") {
    const UnitVector center = random_unit_vector(4, rng);
    const double beta = 0.4;
    const UnitVector w = erm_zero_one(data, center, beta, cfg, rng);
    CHECK(angle(w, center) <= beta + 1e-9);
    CHECK(empirical_error(w, data) <= empirical_error(center, data));
  }
}

TEST_CASE("labeled stream: acceptance filter, prefix determinism, stall error") {
  const LabelOracle oracle = oracle_2d(0.5, 0.25);
  RandomSource base(61);

  SUBCASE("every accepted point satisfies the margin filter") {
    const UnitVector w({1.0, 0.0});
    RandomSource rng = base.split(1);
    const StreamBatch batch = draw_labeled_stream(
        kBall2, oracle, 500, [&](std::span<const double> x) { return margin_test(x, w, 0.2); },
        rng, 100000000, "test");
    CHECK(batch.data.size() == 500);
    CHECK(batch.stream_seen >= 500);
    for (const auto& p : batch.data) CHECK(margin_test(p.x, w, 0.2));
  }

  SUBCASE("two streams from equal sources produce identical prefixes") {
    RandomSource r1 = base.split(2), r2 = base.split(2);
    auto all = [](std::span<const double>) { return true; };
    const StreamBatch b1 = draw_labeled_stream(kBall2, oracle, 50, all, r1, 1000, "a");
    const StreamBatch b2 = draw_labeled_stream(kBall2, oracle, 50, all, r2, 1000, "b");
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(b1.data[i].x == b2.data[i].x);
      CHECK(b1.data[i].y == b2.data[i].y);
    }
  }

  SUBCASE("a rejecting filter trips the stall guard with context") {
    RandomSource rng = base.split(3);
    CHECK_THROWS_WITH_AS(
        draw_labeled_stream(kBall2, oracle, 5, [](std::span<const double>) { return false; },
                            rng, 100, "round 2"),
        doctest::Contains("round 2"), std::runtime_error);
  }
}

TEST_CASE("active run: trace structure and invariants") {
  LearnerConfig cfg = config_2d(1024);
  const LabelOracle oracle = oracle_2d(0.5, 0.25);
  const UnitVector& truth = oracle.bayes_classifier();
  const ActiveRunResult run = run_margin_active(cfg, oracle, kBall2, RandomSource(71), &truth);
  const Schedule sched = make_schedule(cfg);

  REQUIRE(std::ssize(run.trace.rounds) == sched.E);
  CHECK(run.trace.total_labels() <= cfg.T);

  // Round 1 filters nothing: stream_seen equals the labels drawn.
  CHECK(run.trace.rounds[0].stream_seen == sched.n_per_round[0]);
  CHECK(std::isinf(run.trace.rounds[0].b_prev));

  for (int k = 0; k < sched.E; ++k) {
    const auto& rec = run.trace.rounds[static_cast<std::size_t>(k)];
    CHECK(rec.k == k + 1);
    CHECK(rec.beta_prev == sched.beta[static_cast<std::size_t>(k)]);
    CHECK(rec.angle_step <= rec.beta_prev + 1e-9);  // cone containment
    CHECK(rec.has_angle);
    if (k > 0)
      CHECK(rec.beta_prev ==
            cfg.r * run.trace.rounds[static_cast<std::size_t>(k - 1)].beta_prev);
  }
}

TEST_CASE("active run: deterministic under a fixed seed") {
  LearnerConfig cfg = config_2d(512);
  const LabelOracle oracle = oracle_2d(0.5, 0.25);
  const ActiveRunResult a = run_margin_active(cfg, oracle, kBall2, RandomSource(73));
  const ActiveRunResult b = run_margin_active(cfg, oracle, kBall2, RandomSource(73));
  CHECK(a.w.coords() == b.w.coords());
  REQUIRE(a.trace.rounds.size() == b.trace.rounds.size());
  for (std::size_t i = 0; i < a.trace.rounds.size(); ++i) {
    CHECK(a.trace.rounds[i].stream_seen == b.trace.rounds[i].stream_seen);
    CHECK(a.trace.rounds[i].emp_err == b.trace.rounds[i].emp_err);
  }
}

TEST_CASE("active run: round-1 cone usually retains the truth") {
  // theta(w_1, w*) <= beta_1 = r pi should hold in >= 90% of trials.
  LearnerConfig cfg = config_2d(4096);
  const LabelOracle oracle = oracle_2d(0.5, 0.25);
  const UnitVector& truth = oracle.bayes_classifier();
  RandomSource root(79);
  int contained = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const ActiveRunResult run = run_margin_active(
        cfg, oracle, kBall2, root.split(static_cast<std::uint64_t>(trial)), &truth);
    contained += run.trace.rounds[0].angle_to_truth <= cfg.r * kPi;
  }
  CHECK(contained >= 180);
}

TEST_CASE("active run: input validation") {
  LearnerConfig cfg = config_2d(64);
  const LabelOracle oracle = oracle_2d(0.5, 0.25);
  const DataDistribution gauss2{DataDistribution::Kind::IsotropicGaussian, 2};
  CHECK_THROWS_AS(run_margin_active(cfg, oracle, gauss2, RandomSource(1)),
                  std::invalid_argument);  // uniform rule needs the uniform ball
  LearnerConfig bad = cfg;
  bad.d = 3;
  CHECK_THROWS_AS(run_margin_active(bad, oracle, kBall2, RandomSource(1)),
                  std::invalid_argument);
}

TEST_CASE("active run: tiny log-concave margins trip the stall guard") {
  LearnerConfig cfg = config_2d(16);
  cfg.margin_rule.kind = MarginRule::Kind::LogConcave;
  cfg.margin_rule.c1 = 1e-12;
  const LabelOracle oracle = oracle_2d(0.5, 0.25);
  const DataDistribution gauss2{DataDistribution::Kind::IsotropicGaussian, 2};
  CHECK_THROWS_WITH_AS(run_margin_active(cfg, oracle, gauss2, RandomSource(83)),
                       doctest::Contains("round 2"), std::runtime_error);
}

TEST_CASE("passive baseline: realizable accuracy, determinism, validation") {
  LearnerConfig cfg = config_2d(500);
  const LabelOracle noiseless = oracle_2d(0.5, 1e6);

  SUBCASE("close to the truth in >= 95% of realizable trials") {
    RandomSource root(89);
    int good = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
      const UnitVector w =
          run_passive(cfg, noiseless, kBall2, root.split(static_cast<std::uint64_t>(trial)));
      good += angle(w, noiseless.bayes_classifier()) < 0.1;
    }
    CHECK(good >= 95);
  }

  SUBCASE("same seed, same output") {
    const UnitVector w1 = run_passive(cfg, noiseless, kBall2, RandomSource(97));
    const UnitVector w2 = run_passive(cfg, noiseless, kBall2, RandomSource(97));
    CHECK(w1.coords() == w2.coords());
  }

  SUBCASE("an empty budget is rejected") {
    LearnerConfig bad = cfg;
    bad.T = 0;
    CHECK_THROWS_AS(run_passive(bad, noiseless, kBall2, RandomSource(1)),
                    std::invalid_argument);
  }
}

TEST_CASE("noiseless active beats passive in most paired trials") {
  LearnerConfig cfg = config_2d(1024);
  const LabelOracle noiseless = oracle_2d(0.5, 1e6, 1.1);
  const UnitVector& truth = noiseless.bayes_classifier();
  RandomSource root(101);
  int active_better = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const RandomSource pair = root.split(static_cast<std::uint64_t>(trial));
    const ActiveRunResult active = run_margin_active(cfg, noiseless, kBall2, pair);
    const UnitVector passive = run_passive(cfg, noiseless, kBall2, pair);
    active_better += angle(active.w, truth) < angle(passive, truth);
  }
  CHECK(active_better >= 60);
}

TEST_CASE("regime annotations") {
  LearnerConfig cfg = config_2d(256);
  CHECK_FALSE(uniform_rule_in_theorem_regime(cfg));  // d = 2 < 4
  cfg.d = 4;
  CHECK(uniform_rule_in_theorem_regime(cfg));
  CHECK(alpha_in_adaptive_range(0.5, 0.25));  // 0.5 >= 1/3
  CHECK_FALSE(alpha_in_adaptive_range(0.2, 0.25));
}
