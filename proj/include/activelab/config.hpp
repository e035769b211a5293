#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "activelab/learner.hpp"

namespace activelab {

struct OracleConfig {
  std::string kind = "single";  // "single" | "adversarial"
  double alpha = 0.5;
  double mu0 = 0.25;
  std::optional<Vec> w_star;  // single: defaults to e_1 in the learner's dimension
  // adversarial members are referenced by (d, t, index); the packing is
  // rebuilt deterministically from (d, t).
  int d = 2;
  double t = 0.01;
  std::size_t index = 1;

  TncParams params() const { return TncParams(alpha, mu0); }
  LabelOracle build(int learner_d) const;
};

struct DistConfig {
  std::string kind = "uniform_ball";  // "uniform_ball" | "isotropic_gaussian"
  DataDistribution build(int d) const;
};

struct ExperimentConfig {
  std::string kind;  // simulate | sweep | paired | verify-tnc
  LearnerConfig learner;
  OracleConfig oracle;
  DistConfig dist;
  std::vector<std::int64_t> T_grid;
  int trials = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 0;                  // 0 = hardware concurrency
  std::int64_t mc_samples = 100000;  // excess-risk MC size when no closed form applies
  std::int64_t n_samples = 100000;   // verify-tnc sample count

  void validate() const;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

/// FNV-1a over the canonical JSON dump; embedded in output metadata.
std::uint64_t fnv1a64(const std::string& text);
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// "%.12g" formatting used for all CSV numbers (stable across runs).
std::string fmt_double(double v);

}  // namespace activelab
