#include "activelab/config.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "activelab/lowerbound.hpp"

namespace activelab {

using nlohmann::json;

LabelOracle OracleConfig::build(int learner_d) const {
  if (kind == "single") {
    Vec w = w_star.value_or([&] {
      Vec e1(static_cast<std::size_t>(learner_d), 0.0);
      e1[0] = 1.0;
      return e1;
    }());
    return LabelOracle::single_hypothesis(UnitVector::normalized(std::move(w)), params());
  }
  if (kind == "adversarial") {
    const int dim = d % 2 == 0 ? d : d + 1;
    auto packing = std::make_shared<const PackingSet>(
        build_packing(dim, t, build_constant_weight_code(dim)));
    return LabelOracle::adversarial_member(std::move(packing), index, params());
  }
  throw std::invalid_argument("oracle.kind must be \"single\" or \"adversarial\"");
}

DataDistribution DistConfig::build(int d) const {
  DataDistribution dist;
  dist.d = d;
  if (kind == "uniform_ball") {
    dist.kind = DataDistribution::Kind::UniformBall;
  } else if (kind == "isotropic_gaussian") {
    dist.kind = DataDistribution::Kind::IsotropicGaussian;
  } else {
    throw std::invalid_argument("dist.kind must be \"uniform_ball\" or \"isotropic_gaussian\"");
  }
  return dist;
}

void ExperimentConfig::validate() const {
  static const char* kinds[] = {"simulate", "sweep", "paired", "verify-tnc"};
  bool known = false;
  for (const char* k : kinds) known = known || kind == k;
  if (!known) throw std::invalid_argument("config: unknown experiment kind \"" + kind + "\"");
  learner.validate();
  (void)oracle.params();  // rejects invalid (alpha, mu0)
  if (T_grid.empty()) throw std::invalid_argument("config: T_grid must be nonempty");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (T_grid[i] < 4) throw std::invalid_argument("config: every T must be >= 4");
    if (i > 0 && T_grid[i] <= T_grid[i - 1])
      throw std::invalid_argument("config: T_grid must be strictly increasing");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
  if (mc_samples < 1) throw std::invalid_argument("config: mc_samples must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("config: n_samples must be >= 1");
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

ExperimentConfig parse(const json& j) {
  ExperimentConfig cfg;
  if (!j.contains("kind")) throw std::invalid_argument("config: missing \"kind\"");
  cfg.kind = j.at("kind").get<std::string>();

  if (j.contains("learner")) {
    const json& l = j.at("learner");
    cfg.learner.d = get_or(l, "d", cfg.learner.d);
    cfg.learner.delta = get_or(l, "delta", cfg.learner.delta);
    cfg.learner.r = get_or(l, "r", cfg.learner.r);
    cfg.learner.erm_budget = get_or(l, "erm_budget", cfg.learner.erm_budget);
    const std::string rule = get_or<std::string>(l, "margin_rule", "uniform");
    if (rule == "uniform") {
      cfg.learner.margin_rule.kind = MarginRule::Kind::Uniform;
    } else if (rule == "log_concave") {
      cfg.learner.margin_rule.kind = MarginRule::Kind::LogConcave;
    } else {
      throw std::invalid_argument("config: margin_rule must be \"uniform\" or \"log_concave\"");
    }
    cfg.learner.margin_rule.c1 = get_or(l, "c1", cfg.learner.margin_rule.c1);
  }

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    cfg.oracle.kind = get_or<std::string>(o, "kind", cfg.oracle.kind);
    cfg.oracle.alpha = get_or(o, "alpha", cfg.oracle.alpha);
    cfg.oracle.mu0 = get_or(o, "mu0", cfg.oracle.mu0);
    if (o.contains("wstar")) cfg.oracle.w_star = o.at("wstar").get<Vec>();
    cfg.oracle.d = get_or(o, "d", cfg.learner.d);
    cfg.oracle.t = get_or(o, "t", cfg.oracle.t);
    cfg.oracle.index = get_or(o, "index", cfg.oracle.index);
  } else {
    cfg.oracle.d = cfg.learner.d;
  }

  if (j.contains("dist")) cfg.dist.kind = get_or<std::string>(j.at("dist"), "kind", cfg.dist.kind);

  if (j.contains("T")) cfg.T_grid = {j.at("T").get<std::int64_t>()};
  if (j.contains("T_grid")) cfg.T_grid = j.at("T_grid").get<std::vector<std::int64_t>>();
  if (!cfg.T_grid.empty()) cfg.learner.T = cfg.T_grid.front();

  cfg.trials = get_or(j, "trials", cfg.trials);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.out = get_or<std::string>(j, "out", cfg.out);
  cfg.workers = get_or(j, "workers", cfg.workers);
  cfg.mc_samples = get_or(j, "mc_samples", cfg.mc_samples);
  cfg.n_samples = get_or(j, "n_samples", cfg.n_samples);
  return cfg;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return parse(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
  json l{{"d", learner.d},
         {"delta", learner.delta},
         {"r", learner.r},
         {"erm_budget", learner.erm_budget},
         {"margin_rule",
          learner.margin_rule.kind == MarginRule::Kind::Uniform ? "uniform" : "log_concave"},
         {"c1", learner.margin_rule.c1}};
  json o{{"kind", oracle.kind}, {"alpha", oracle.alpha}, {"mu0", oracle.mu0}};
  if (oracle.w_star) o["wstar"] = *oracle.w_star;
  if (oracle.kind == "adversarial") {
    o["d"] = oracle.d;
    o["t"] = oracle.t;
    o["index"] = oracle.index;
  }
  json j{{"kind", kind},      {"learner", l},
         {"oracle", o},       {"dist", json{{"kind", dist.kind}}},
         {"T_grid", T_grid},  {"trials", trials},
         {"out", out},        {"workers", workers},
         {"mc_samples", mc_samples}, {"n_samples", n_samples}};
  if (seed) j["seed"] = *seed;
  return j.dump();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(cfg.to_json_text()); }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace activelab
