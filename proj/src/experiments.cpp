#include "activelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace activelab {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t resolve_seed(const ExperimentConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("ACTIVE_LAB_SEED")) return std::strtoull(env, nullptr, 10);
  return 12345;
}

namespace {

double excess_of(const UnitVector& w, const LabelOracle& oracle, const DataDistribution& dist,
                 std::int64_t mc_samples, RandomSource mc_rng, double* angle_out) {
  const double theta = angle(w, oracle.bayes_classifier());
  if (angle_out != nullptr) *angle_out = theta;
  if (dist.kind == DataDistribution::Kind::UniformBall && dist.d == 2 && oracle.is_single())
    return excess_risk_exact_2d(theta, oracle.params());
  return excess_risk_mc(w, oracle, dist, mc_samples, mc_rng).value;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.oracle.kind != "single")
    throw std::invalid_argument("run_sweep: requires a single-hypothesis oracle");

  const LabelOracle oracle = cfg.oracle.build(cfg.learner.d);
  const DataDistribution dist = cfg.dist.build(cfg.learner.d);
  const RandomSource root(resolve_seed(cfg));

  SweepResult result;
  result.slope_target = -1.0 / (2.0 * cfg.oracle.alpha);
  result.low_confidence = cfg.T_grid.size() < 3;
  result.rows.resize(cfg.T_grid.size() * static_cast<std::size_t>(cfg.trials));

  for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
    LearnerConfig learner = cfg.learner;
    learner.T = cfg.T_grid[ti];
    const RandomSource per_t = root.split(ti);
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t trial) {
      RandomSource trial_rng = per_t.split(trial);
      const ActiveRunResult run =
          run_margin_active(learner, oracle, dist, trial_rng, &oracle.bayes_classifier());
      SweepRow row;
      row.alpha = cfg.oracle.alpha;
      row.d = learner.d;
      row.T = learner.T;
      row.trial = static_cast<int>(trial);
      row.excess =
          excess_of(run.w, oracle, dist, cfg.mc_samples, trial_rng.split(2), &row.angle);
      row.labels_used = run.trace.total_labels();
      result.rows[ti * static_cast<std::size_t>(cfg.trials) + trial] = row;
    });
  }

  std::vector<std::pair<double, double>> points;
  for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
    double mean = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial)
      mean += result.rows[ti * static_cast<std::size_t>(cfg.trials) +
                          static_cast<std::size_t>(trial)]
                  .excess;
    mean /= static_cast<double>(cfg.trials);
    result.mean_excess_per_t.push_back(mean);
    points.emplace_back(static_cast<double>(cfg.T_grid[ti]), mean);
  }
  // Slope of log mean-excess (not mean log-excess): how rates are read off
  // convergence plots.
  result.slope = points.size() >= 2 ? rate_slope(points)
                                    : std::numeric_limits<double>::quiet_NaN();
  return result;
}

double sign_test_pvalue(int n, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double p = 0.0;
  const double log_half = std::log(0.5);
  for (int i = k; i <= n; ++i) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                  n * log_half);
  }
  return std::min(1.0, p);
}

PairedResult run_paired(const ExperimentConfig& cfg) {
  cfg.validate();
  const LabelOracle oracle = cfg.oracle.build(cfg.learner.d);
  const DataDistribution dist = cfg.dist.build(cfg.learner.d);
  const RandomSource root(resolve_seed(cfg));

  PairedResult result;
  result.rows.resize(cfg.T_grid.size() * static_cast<std::size_t>(cfg.trials));
  for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
    LearnerConfig learner = cfg.learner;
    learner.T = cfg.T_grid[ti];
    const RandomSource per_t = root.split(ti);
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t trial) {
      // Both arms receive the same source; each derives its stream from
      // split(1), so round 1 of the active arm (margin = +inf) consumes the
      // exact prefix the passive arm sees.
      const RandomSource pair_rng = per_t.split(trial);
      const ActiveRunResult active = run_margin_active(learner, oracle, dist, pair_rng);
      const UnitVector passive = run_passive(learner, oracle, dist, pair_rng);
      PairedRow row;
      row.T = learner.T;
      row.trial = static_cast<int>(trial);
      row.active_excess =
          excess_of(active.w, oracle, dist, cfg.mc_samples, pair_rng.split(2), nullptr);
      row.passive_excess =
          excess_of(passive, oracle, dist, cfg.mc_samples, pair_rng.split(3), nullptr);
      result.rows[ti * static_cast<std::size_t>(cfg.trials) + trial] = row;
    });
  }

  std::vector<double> active, passive;
  for (const auto& row : result.rows) {
    active.push_back(row.active_excess);
    passive.push_back(row.passive_excess);
    if (row.active_excess < row.passive_excess) ++result.active_wins;
    if (row.active_excess != row.passive_excess) ++result.effective_pairs;
  }
  result.median_active = median(std::move(active));
  result.median_passive = median(std::move(passive));
  result.sign_test_p = sign_test_pvalue(result.effective_pairs, result.active_wins);
  return result;
}

namespace {

void write_metadata(std::ostream& os, const ExperimentConfig& cfg) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  os << "# seed=" << resolve_seed(cfg) << " config_hash=" << hash << "\n";
}

}  // namespace

void write_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& result) {
  write_metadata(os, cfg);
  os << "# slope=" << fmt_double(result.slope)
     << " slope_target=" << fmt_double(result.slope_target)
     << " low_confidence=" << (result.low_confidence ? 1 : 0) << "\n";
  if (!uniform_rule_in_theorem_regime(cfg.learner) &&
      cfg.learner.margin_rule.kind == MarginRule::Kind::Uniform)
    os << "# note=uniform margin rule outside its d>=4 guarantee regime\n";
  if (!alpha_in_adaptive_range(cfg.oracle.alpha, cfg.learner.r))
    os << "# note=alpha below the adaptive range for this r\n";
  os << "alpha,d,T,trial,excess_risk,angle_rad,labels_used\n";
  for (const auto& r : result.rows) {
    os << fmt_double(r.alpha) << ',' << r.d << ',' << r.T << ',' << r.trial << ','
       << fmt_double(r.excess) << ',' << fmt_double(r.angle) << ',' << r.labels_used << "\n";
  }
}

void write_paired_csv(std::ostream& os, const ExperimentConfig& cfg, const PairedResult& result) {
  write_metadata(os, cfg);
  os << "# median_active=" << fmt_double(result.median_active)
     << " median_passive=" << fmt_double(result.median_passive)
     << " active_wins=" << result.active_wins << " effective_pairs=" << result.effective_pairs
     << " sign_test_p=" << fmt_double(result.sign_test_p) << "\n";
  os << "T,trial,active_excess_risk,passive_excess_risk,excess_diff\n";
  for (const auto& r : result.rows) {
    os << r.T << ',' << r.trial << ',' << fmt_double(r.active_excess) << ','
       << fmt_double(r.passive_excess) << ','
       << fmt_double(r.active_excess - r.passive_excess) << "\n";
  }
}

void write_trace_csv(std::ostream& os, const ExperimentConfig& cfg, const RunTrace& trace,
                     int trial) {
  write_metadata(os, cfg);
  os << "trial,k,beta_rad,b_margin,labels_used,stream_seen,emp_err,angle_to_truth_rad\n";
  for (const auto& r : trace.rounds) {
    os << trial << ',' << r.k << ',' << fmt_double(r.beta_prev) << ',' << fmt_double(r.b_prev)
       << ',' << r.labels_used << ',' << r.stream_seen << ',' << fmt_double(r.emp_err) << ','
       << (r.has_angle ? fmt_double(r.angle_to_truth) : std::string()) << "\n";
  }
}

}  // namespace activelab
