#include <doctest.h>

#include <cmath>
#include <memory>
#include <set>

#include "activelab/lowerbound.hpp"

using namespace activelab;

TEST_CASE("constant-weight codes: small dimensions enumerate fully") {
  SUBCASE("d = 2") {
    const CodewordSet code = build_constant_weight_code(2);
    CHECK(code.words.size() == 2);  // (1,0) and (0,1)
    CHECK(std::log2(static_cast<double>(code.words.size())) >= 0.0625 * 2);
  }
  SUBCASE("d = 4: all 6 weight-2 words qualify at distance >= 1/4") {
    const CodewordSet code = build_constant_weight_code(4);
    CHECK(code.words.size() == 6);
  }
  SUBCASE("d = 16: every distinct pair has distance >= 2 >= 1, so C(16,8) words") {
    const CodewordSet code = build_constant_weight_code(16);
    CHECK(code.words.size() == 12870);
  }
  CHECK_THROWS_AS(build_constant_weight_code(3), std::invalid_argument);
  CHECK_THROWS_AS(build_constant_weight_code(0), std::invalid_argument);
}

TEST_CASE("constant-weight codes: weight, distance and size invariants") {
  for (int d : {2, 4, 6, 8, 10, 12, 16, 20, 24, 32}) {
    const CodewordSet code = build_constant_weight_code(d);
    CHECK(std::log2(static_cast<double>(code.words.size())) >= 0.0625 * d);
    std::set<std::vector<std::uint8_t>> unique(code.words.begin(), code.words.end());
    CHECK(unique.size() == code.words.size());
    bool weights_ok = true;
    for (const auto& w : code.words) {
      int weight = 0;
      for (auto bit : w) weight += bit;
      weights_ok = weights_ok && weight == d / 2;
    }
    CHECK(weights_ok);
    bool distances_ok = true;
    for (std::size_t i = 0; i < code.words.size() && distances_ok; ++i)
      for (std::size_t j = i + 1; j < code.words.size(); ++j)
        distances_ok = distances_ok && hamming_distance(code.words[i], code.words[j]) >= code.delta_h;
    CHECK(distances_ok);
  }
}

TEST_CASE("packing: worked 2-D example") {
  // t = 0.05: a = 0.2, Z = sqrt(1.64), w1 = (0.8, 1)/Z, w2 = (1, 0.8)/Z,
  // cos(theta) = 1.6/1.64, theta ~ 0.2210 inside [t, 6.5t] = [0.05, 0.325].
  const PackingSet p = build_packing(2, 0.05, build_constant_weight_code(2));
  CHECK(p.a == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p.z == doctest::Approx(std::sqrt(1.64)).epsilon(1e-15));
  REQUIRE(p.size() == 2);
  CHECK(p.hypotheses[0][0] == doctest::Approx(0.8 / std::sqrt(1.64)).epsilon(1e-14));
  CHECK(p.hypotheses[0][1] == doctest::Approx(1.0 / std::sqrt(1.64)).epsilon(1e-14));

  const SeparationReport rep = verify_separation(p);
  CHECK(rep.pass);
  CHECK(rep.min_angle == doctest::Approx(std::acos(1.6 / 1.64)).epsilon(1e-12));
  CHECK(rep.max_angle == doctest::Approx(0.2210).epsilon(1e-3));
}

TEST_CASE("packing: unit norms, separation window, exact cosine identity") {
  for (int d : {2, 4, 8, 16}) {
    for (double t : {0.01, 0.05}) {
      CodewordSet code = build_constant_weight_code(d);
      if (code.words.size() > 200) code.words.resize(200);  // keep the pair check light here
      const PackingSet p = build_packing(d, t, code);
      for (const auto& w : p.hypotheses) CHECK(std::abs(norm(w) - 1.0) <= 1e-12);

      if (p.size() >= 2) {
        const SeparationReport rep = verify_separation(p);
        CHECK(rep.pass);
        CHECK(rep.min_angle >= t);
        CHECK(rep.max_angle <= 6.5 * t);
      }
      const double z2 = p.z * p.z;
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
          const double expected =
              (z2 -
               0.5 * hamming_distance(p.codewords.words[i], p.codewords.words[j]) * p.a * p.a) /
              z2;
          CHECK(std::abs(dot(p.hypotheses[i], p.hypotheses[j]) - expected) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("packing: parameter validation and fault injection") {
  const CodewordSet code = build_constant_weight_code(4);
  CHECK_THROWS_AS(build_packing(4, 0.0, code), std::invalid_argument);
  CHECK_THROWS_AS(build_packing(4, 0.25, code), std::invalid_argument);
  CHECK_THROWS_AS(build_packing(4, 0.3, code), std::invalid_argument);

  PackingSet p = build_packing(4, 0.05, code);
  for (double& v : p.hypotheses[2]) v *= 1.1;  // un-normalize one hypothesis
  const SeparationReport rep = verify_separation(p);
  CHECK_FALSE(rep.pass);
  bool named = false;
  for (const auto& v : rep.violations) named = named || (v.i == 2 && v.j == 2);
  CHECK(named);

  PackingSet single = build_packing(4, 0.05, code);
  single.hypotheses.resize(1);
  CHECK_THROWS_AS(verify_separation(single), std::invalid_argument);
}

TEST_CASE("bernoulli_kl: identity, direct value, asymmetry, quadratic bound") {
  CHECK(bernoulli_kl(0.17, 0.17) == 0.0);
  // Shifts 0.1 and 0.2 are laws 0.4 and 0.3.
  const double v = bernoulli_kl(0.1, 0.2);
  CHECK(v ==
        doctest::Approx(0.4 * std::log(4.0 / 3.0) + 0.6 * std::log(6.0 / 7.0)).epsilon(1e-15));
  CHECK(v <= 8.0 * 0.01);
  CHECK(bernoulli_kl(0.2, 0.1) != v);  // asymmetric in general

  // Degenerate-law conventions.
  CHECK(bernoulli_kl(0.5, 0.5) == 0.0);
  CHECK(std::isinf(bernoulli_kl(0.1, 0.5)));
  CHECK(std::isfinite(bernoulli_kl(0.5, 0.1)));
  CHECK_THROWS_AS(bernoulli_kl(0.6, 0.0), std::invalid_argument);

  // 100 x 100 grid over [-1/4, 1/4]^2: KL <= 8 (p - q)^2, both orders.
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double p = -0.25 + 0.5 * i / 99.0;
      const double q = -0.25 + 0.5 * j / 99.0;
      CHECK(bernoulli_kl(p, q) <= 8.0 * (p - q) * (p - q) + 1e-15);
    }
  }
}

TEST_CASE("kl budget: constant arithmetic and vanishing limit") {
  const TncParams p05(0.5, 0.25);
  CHECK(kl_constant(p05) == doctest::Approx(13.0).epsilon(1e-14));
  CHECK(kl_per_query_bound(p05, 0.01) == doctest::Approx(1352.0 * 1e-4).epsilon(1e-12));
  CHECK(kl_per_query_bound(p05, 1e-9) < 1e-14);  // t -> 0 drives the bound to 0
  CHECK_THROWS_AS(kl_per_query_bound(p05, 0.0), std::invalid_argument);
}

TEST_CASE("summed pointwise KL over a query sequence is at most T times the sup") {
  const TncParams p(0.5, 0.25);
  const auto packing =
      std::make_shared<const PackingSet>(build_packing(4, 0.02, build_constant_weight_code(4)));
  const LabelOracle a = LabelOracle::adversarial_member(packing, 0, p);
  const LabelOracle b = LabelOracle::adversarial_member(packing, 3, p);

  RandomSource rng(41);
  const int T = 200;
  std::vector<Vec> queries;
  for (int i = 0; i < T; ++i) queries.push_back(random_unit_vector(4, rng).coords());
  double total = 0.0, sup = 0.0;
  for (const auto& x : queries) {
    const double g = pointwise_kl_gap(a, b, x);
    total += g;
    sup = std::max(sup, g);
  }
  CHECK(total <= T * sup + 1e-15);
  CHECK(total <= T * kl_per_query_bound(p, packing->t) + 1e-15);
}

TEST_CASE("certify: worked example at d=4, T=1000") {
  const TncParams p(0.5, 0.25);
  const LowerBoundCertificate cert = certify(4, 1000, p);
  CHECK(cert.M == 2);
  CHECK(cert.d_used == 4);
  // Direct solve of 1352 T t^2 <= (1/8 - 0.01) ln 2.
  const double expected_t = std::sqrt((0.125 - 0.01) * std::log(2.0) / (1352.0 * 1000.0));
  CHECK(cert.t == doctest::Approx(expected_t).epsilon(1e-9));
  CHECK(cert.t <= 2.532e-4);  // upper bound from solving with gamma = 1/8
  CHECK(cert.rho == cert.t / 2.0);
  CHECK(cert.gamma < 0.125);
  CHECK(cert.gamma == doctest::Approx(0.115).epsilon(1e-6));
  CHECK(cert.all_ok());
}

TEST_CASE("certify: doubling T shrinks t by sqrt(2) at alpha = 1/2") {
  const TncParams p(0.5, 0.25);
  const LowerBoundCertificate c1 = certify(4, 1000, p);
  const LowerBoundCertificate c2 = certify(4, 2000, p);
  CHECK(c1.t / c2.t == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // Same kappa: t has the form kappa (d/T)^((1-alpha)/(2 alpha)).
  CHECK(c1.kappa == doctest::Approx(c2.kappa).epsilon(1e-9));
}

TEST_CASE("certify: odd dimensions are padded, alpha = 0.7 works") {
  const LowerBoundCertificate cert = certify(5, 500, TncParams(0.7, 0.25));
  CHECK(cert.d == 5);
  CHECK(cert.d_used == 6);
  CHECK(cert.all_ok());
  CHECK(cert.gamma < 0.125);
  CHECK_THROWS_AS(certify(1, 100, TncParams(0.5, 0.25)), std::invalid_argument);
}
