#include "activelab/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "activelab/experiments.hpp"
#include "activelab/lowerbound.hpp"

namespace activelab {

namespace {

using nlohmann::json;

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  return file;
}

json certificate_json(const LowerBoundCertificate& cert) {
  return json{{"d", cert.d},
              {"d_used", cert.d_used},
              {"T", cert.T},
              {"alpha", cert.params.alpha},
              {"mu0", cert.params.mu0},
              {"t", cert.t},
              {"M", cert.M},
              {"rho", cert.rho},
              {"kappa", cert.kappa},
              {"gamma", cert.gamma},
              {"kl_bound", cert.kl_bound_per_query},
              {"kl_numeric_sup", cert.kl_numeric_sup},
              {"checks",
               json{{"separation", cert.separation_ok},
                    {"continuity", cert.continuity_ok},
                    {"kl", cert.kl_ok}}}};
}

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

ExperimentConfig load_config(const CommonFlags& flags, const std::string& kind) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(flags.config_path);
  if (cfg.kind != kind)
    throw std::invalid_argument("config kind \"" + cfg.kind + "\" does not match subcommand " +
                                kind);
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (flags.workers) cfg.workers = *flags.workers;
  cfg.validate();
  return cfg;
}

int run_simulate(const ExperimentConfig& cfg) {
  const LabelOracle oracle = cfg.oracle.build(cfg.learner.d);
  const DataDistribution dist = cfg.dist.build(cfg.learner.d);
  LearnerConfig learner = cfg.learner;
  learner.T = cfg.T_grid.front();
  RandomSource rng(resolve_seed(cfg));
  const UnitVector* truth = cfg.oracle.kind == "single" ? &oracle.bayes_classifier() : nullptr;
  const ActiveRunResult run = run_margin_active(learner, oracle, dist, rng.split(0), truth);

  std::ofstream file;
  std::ostream& os = open_or_stdout(cfg.out, file);
  write_trace_csv(os, cfg, run.trace, 0);
  return 0;
}

int run_verify_tnc(const ExperimentConfig& cfg) {
  const LabelOracle oracle = cfg.oracle.build(cfg.learner.d);
  const TncParams params = oracle.params();
  RandomSource rng(resolve_seed(cfg));

  // Empirical check of the construction invariant
  //   |eta(x) - 1/2| >= mu0 |phi(x, w_bayes)|^(alpha/(1-alpha))
  // at n random directions.
  double min_slack = std::numeric_limits<double>::infinity();
  const int d = oracle.dim();
  for (std::int64_t i = 0; i < cfg.n_samples; ++i) {
    const UnitVector x = random_unit_vector(d, rng);
    const double phi = std::abs(signed_angle(x, oracle.bayes_classifier()));
    const double lhs = std::abs(oracle.eta(x.span()) - 0.5);
    min_slack = std::min(min_slack, lhs - params.mu0 * std::pow(phi, params.exponent()));
  }
  const bool pass = min_slack >= -1e-12;

  json report{{"kind", cfg.oracle.kind},
              {"alpha", params.alpha},
              {"mu0", params.mu0},
              {"feasible", params.feasible_on_sphere()},
              {"n_samples", cfg.n_samples},
              {"min_slack", min_slack},
              {"pass", pass}};
  if (cfg.oracle.kind == "adversarial") {
    report["t"] = cfg.oracle.t;
    report["index"] = cfg.oracle.index;
  }
  std::ofstream file;
  std::ostream& os = open_or_stdout(cfg.out, file);
  os << report.dump(2) << "\n";
  return pass ? 0 : 2;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"simulation lab for margin-based active learning of halfspaces under "
               "low-noise label distributions"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto add_config_flags = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", flags.config_path, "JSON experiment config");
    if (config_required) opt->required();
    sub->add_option("--out", flags.out, "output path (default: config's, else stdout)");
    sub->add_option("--seed", flags.seed, "seed override");
    sub->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
  };

  auto* sweep_cmd = app.add_subcommand("sweep", "budget sweep with rate-slope fit");
  add_config_flags(sweep_cmd, true);
  auto* paired_cmd = app.add_subcommand("paired", "paired active-vs-passive trials");
  add_config_flags(paired_cmd, true);
  auto* simulate_cmd = app.add_subcommand("simulate", "single active run, trace CSV");
  add_config_flags(simulate_cmd, true);
  auto* verify_cmd = app.add_subcommand("verify-tnc", "empirical noise-condition check");
  add_config_flags(verify_cmd, true);

  struct {
    int d = 4;
    std::int64_t T = 1000;
    double alpha = 0.5;
    double mu0 = 0.25;
    std::int64_t samples = 100000;
    std::uint64_t seed = 0xA17;
    std::string out;
  } cert;
  auto* certify_cmd = app.add_subcommand("certify", "lower-bound condition certificate");
  certify_cmd->add_option("--d", cert.d, "dimension")->required();
  certify_cmd->add_option("--T", cert.T, "query budget")->required();
  certify_cmd->add_option("--alpha", cert.alpha, "noise exponent in (0,1)")->required();
  certify_cmd->add_option("--mu0", cert.mu0, "noise scale > 0")->required();
  certify_cmd->add_option("--samples", cert.samples, "KL sampling size");
  certify_cmd->add_option("--seed", cert.seed, "sampling seed");
  certify_cmd->add_option("--out", cert.out, "certificate path (default stdout)");

  struct {
    int d = 8;
    double t = 0.01;
    std::string out;
  } pack;
  auto* pack_cmd = app.add_subcommand("pack", "well-separated hypothesis packing CSV");
  pack_cmd->add_option("--d", pack.d, "dimension")->required();
  pack_cmd->add_option("--t", pack.t, "separation scale in (0, 1/4)")->required();
  pack_cmd->add_option("--out", pack.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sweep_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(flags, "sweep");
      const SweepResult result = run_sweep(cfg);
      std::ofstream file;
      write_sweep_csv(open_or_stdout(cfg.out, file), cfg, result);
      return 0;
    }
    if (paired_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(flags, "paired");
      const PairedResult result = run_paired(cfg);
      std::ofstream file;
      write_paired_csv(open_or_stdout(cfg.out, file), cfg, result);
      return 0;
    }
    if (simulate_cmd->parsed()) return run_simulate(load_config(flags, "simulate"));
    if (verify_cmd->parsed()) return run_verify_tnc(load_config(flags, "verify-tnc"));
    if (certify_cmd->parsed()) {
      CertifyOptions options;
      options.n_samples = cert.samples;
      options.seed = cert.seed;
      const LowerBoundCertificate result =
          certify(cert.d, cert.T, TncParams(cert.alpha, cert.mu0), options);
      std::ofstream file;
      std::ostream& os = open_or_stdout(cert.out, file);
      os << certificate_json(result).dump(2) << "\n";
      return result.all_ok() ? 0 : 2;
    }
    if (pack_cmd->parsed()) {
      const int d = pack.d % 2 == 0 ? pack.d : pack.d + 1;
      const PackingSet packing = build_packing(d, pack.t, build_constant_weight_code(d));
      const SeparationReport report = verify_separation(packing);
      if (!report.pass) throw std::runtime_error("packing failed separation verification");
      std::ofstream file;
      std::ostream& os = open_or_stdout(pack.out, file);
      os << "# d=" << d << " t=" << fmt_double(packing.t) << " a=" << fmt_double(packing.a)
         << " Z=" << fmt_double(packing.z) << " count=" << packing.size()
         << " min_angle_rad=" << fmt_double(report.min_angle)
         << " max_angle_rad=" << fmt_double(report.max_angle) << "\n";
      os << "index";
      for (int j = 0; j < d; ++j) os << ",w" << j;
      os << "\n";
      for (std::size_t i = 0; i < packing.size(); ++i) {
        os << i;
        for (double v : packing.hypotheses[i]) os << ',' << fmt_double(v);
        os << "\n";
      }
      return 0;
    }
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace activelab
