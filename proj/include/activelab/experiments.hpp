#pragma once

#include <functional>
#include <ostream>

#include "activelab/config.hpp"
#include "activelab/risk.hpp"

namespace activelab {

/// Runs fn(0..n-1) on up to `workers` threads (0 = hardware concurrency).
/// Work items must be independent; callers store results by index so the
/// merged output is identical to a sequential run.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

struct SweepRow {
  double alpha = 0;
  int d = 0;
  std::int64_t T = 0;
  int trial = 0;
  double excess = 0;
  double angle = 0;
  std::int64_t labels_used = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;             // one row per (T, trial)
  std::vector<double> mean_excess_per_t;  // aligned with cfg.T_grid
  double slope = 0;                       // log mean-excess vs log T
  double slope_target = 0;                // -1 / (2 alpha)
  bool low_confidence = false;            // fewer than 3 grid points
};

/// Budget sweep: `trials` independent runs of the active learner per T.
/// Excess risk is exact on the 2-D uniform-disk single-hypothesis case and
/// Monte Carlo otherwise.  Requires a single-hypothesis oracle.
SweepResult run_sweep(const ExperimentConfig& cfg);

struct PairedRow {
  std::int64_t T = 0;
  int trial = 0;
  double active_excess = 0;
  double passive_excess = 0;
};

struct PairedResult {
  std::vector<PairedRow> rows;
  double median_active = 0;
  double median_passive = 0;
  int active_wins = 0;  // pairs with active < passive (ties dropped)
  int effective_pairs = 0;
  double sign_test_p = 0;  // one-sided P[Bin(n, 1/2) >= wins]
};

/// Active vs passive at equal label budget; each pair shares one seed, so
/// both arms see the same stream prefix while the active filter accepts
/// everything (round 1).
PairedResult run_paired(const ExperimentConfig& cfg);

/// One-sided exact binomial tail P[Bin(n, 1/2) >= k].
double sign_test_pvalue(int n, int k);

std::uint64_t resolve_seed(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& result);
void write_paired_csv(std::ostream& os, const ExperimentConfig& cfg, const PairedResult& result);
void write_trace_csv(std::ostream& os, const ExperimentConfig& cfg, const RunTrace& trace,
                     int trial);

}  // namespace activelab
