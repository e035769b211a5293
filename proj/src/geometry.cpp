#include "activelab/geometry.hpp"

#include <algorithm>

namespace activelab {

double angle(const UnitVector& u, const UnitVector& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("angle: dimension mismatch");
  const double c = std::clamp(dot(u.span(), v.span()), -1.0, 1.0);
  return std::acos(c);
}

double signed_angle(const UnitVector& x, const UnitVector& w) {
  return kPi / 2.0 - angle(x, w);
}

double signed_angle_to(std::span<const double> x, const UnitVector& w) {
  if (x.size() != w.dim()) throw std::invalid_argument("signed_angle_to: dimension mismatch");
  const double n = norm(x);
  if (!(n > 1e-300)) throw std::invalid_argument("signed_angle_to: zero vector");
  const double c = std::clamp(dot(x, w.span()) / n, -1.0, 1.0);
  return kPi / 2.0 - std::acos(c);
}

Vec sample(const DataDistribution& dist, RandomSource& rng) {
  if (dist.d < 2) throw std::invalid_argument("sample: dimension must be >= 2");
  Vec x(static_cast<std::size_t>(dist.d));
  for (double& v : x) v = rng.normal();
  if (dist.kind == DataDistribution::Kind::IsotropicGaussian) return x;

  // Uniform ball: normalize the Gaussian direction, then scale by U^(1/d).
  const double n = norm(x);
  if (!(n > 1e-300)) {
    // Astronomically unlikely; fall back to a fixed direction at radius 0.
    std::fill(x.begin(), x.end(), 0.0);
    return x;
  }
  const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(dist.d));
  for (double& v : x) v *= r / n;
  return x;
}

UnitVector random_unit_vector(int d, RandomSource& rng) {
  if (d < 2) throw std::invalid_argument("random_unit_vector: dimension must be >= 2");
  while (true) {
    Vec x(static_cast<std::size_t>(d));
    for (double& v : x) v = rng.normal();
    if (norm(x) > 1e-12) return UnitVector::normalized(std::move(x));
  }
}

UnitVector orthonormal_tangent(const UnitVector& at, RandomSource& rng) {
  while (true) {
    Vec g(at.dim());
    for (double& v : g) v = rng.normal();
    const double proj = dot(g, at.span());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= proj * at[i];
    if (norm(g) > 1e-9) return UnitVector::normalized(std::move(g));
  }
}

UnitVector rotate_toward(const UnitVector& from, const UnitVector& tangent, double theta) {
  if (from.dim() != tangent.dim())
    throw std::invalid_argument("rotate_toward: dimension mismatch");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Vec out(from.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * from[i] + s * tangent[i];
  return UnitVector::normalized(std::move(out));
}

UnitVector sample_in_cone(const UnitVector& center, double beta, RandomSource& rng) {
  if (!(beta > 0.0)) throw std::invalid_argument("sample_in_cone: beta must be > 0");
  const double cap = std::min(beta, kPi);
  const UnitVector u = orthonormal_tangent(center, rng);
  const double theta = rng.uniform() * cap;
  return rotate_toward(center, u, theta);
}

}  // namespace activelab
