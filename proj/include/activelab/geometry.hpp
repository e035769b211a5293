#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace activelab {

using Vec = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;

// Sign convention: sgn(0) = +1, so classifiers and label distributions are
// well defined on the decision hyperplane itself.
inline int sign_nonneg(double v) { return v >= 0.0 ? +1 : -1; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

/// Counter-based splittable generator (splitmix-style).
///
/// The i-th output is a pure function of (key, i), so a stream is
/// reproducible bit-for-bit from its seed, and split(index) derives a child
/// whose stream depends only on (parent key, index) -- not on how many
/// values the parent has produced.  Use distinct indices for distinct
/// children.  A single instance must not be shared across threads; children
/// may be consumed concurrently.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  RandomSource split(std::uint64_t index) const {
    return RandomSource(mix(key_ ^ mix(index + 0x9e3779b97f4a7c15ULL)), Internal{});
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_positive() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (second value cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_positive();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  struct Internal {};
  RandomSource(std::uint64_t key, Internal) : key_(key) {}

  static std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// A point or hypothesis on the unit sphere in R^d, d >= 2.
/// Construction rejects vectors whose norm deviates from 1 by more than 1e-9.
class UnitVector {
 public:
  static constexpr double kNormTolerance = 1e-9;

  explicit UnitVector(Vec coords) : c_(std::move(coords)) {
    if (c_.size() < 2) throw std::invalid_argument("UnitVector: dimension must be >= 2");
    const double n = norm(c_);
    if (std::abs(n - 1.0) > kNormTolerance)
      throw std::invalid_argument("UnitVector: norm deviates from 1 beyond tolerance");
  }

  /// Builds a unit vector by normalizing; rejects (near-)zero input.
  static UnitVector normalized(Vec coords) {
    const double n = norm(coords);
    if (!(n > 1e-300)) throw std::invalid_argument("UnitVector: cannot normalize zero vector");
    for (double& v : coords) v /= n;
    return UnitVector(std::move(coords));
  }

  const Vec& coords() const { return c_; }
  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<const double> span() const { return c_; }

 private:
  Vec c_;
};

struct DataDistribution {
  enum class Kind { UniformBall, IsotropicGaussian };
  Kind kind = Kind::UniformBall;
  int d = 2;
};

/// theta(u, v) = arccos(u . v) in [0, pi].  Inner products are clamped to
/// [-1, 1] before arccos for floating-point safety at near-parallel vectors.
double angle(const UnitVector& u, const UnitVector& v);

/// Signed acute angle between x and the decision hyperplane of w:
/// phi(x, w) = pi/2 - theta(x, w) in [-pi/2, pi/2]; positive iff w . x > 0.
double signed_angle(const UnitVector& x, const UnitVector& w);

/// signed_angle for an arbitrary nonzero vector (normalized internally).
double signed_angle_to(std::span<const double> x, const UnitVector& w);

/// One i.i.d. draw from the distribution.  UniformBall uses direction x
/// radius U^(1/d), which is exact and rejection-free in any dimension.
Vec sample(const DataDistribution& dist, RandomSource& rng);

/// Uniform direction on the sphere (normalized Gaussian).
UnitVector random_unit_vector(int d, RandomSource& rng);

/// Random unit vector u orthogonal to `at`.
UnitVector orthonormal_tangent(const UnitVector& at, RandomSource& rng);

/// cos(theta) * from + sin(theta) * tangent, renormalized.
/// `tangent` must be a unit vector orthogonal to `from`.
UnitVector rotate_toward(const UnitVector& from, const UnitVector& tangent, double theta);

/// A unit vector u with theta(u, center) <= beta, 0 < beta <= pi.  Sampled
/// by slerping the center toward a random tangent by an angle uniform in
/// [0, beta): full support over the cone, no rejection loop.  The
/// distribution is not uniform over the cone (only support matters for the
/// way this is used as candidate generation).
UnitVector sample_in_cone(const UnitVector& center, double beta, RandomSource& rng);

/// True iff |w . x| <= b.  b = +infinity accepts everything.
inline bool margin_test(std::span<const double> x, const UnitVector& w, double b) {
  return std::abs(dot(x, w.span())) <= b;
}

}  // namespace activelab
