#include "ocf/tools/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "ocf/csv.hpp"

namespace ocf::tools {

namespace fs = std::filesystem;

CallExpr CallExpr::Parse(std::string_view text) {
  CallExpr c;
  std::string s = Trim(std::string(text));
  auto open = s.find('(');
  if (open == std::string::npos) {
    c.name = s;
  } else {
    if (s.back() != ')') throw ConfigError("'" + s + "': missing ')'");
    c.name = Trim(s.substr(0, open));
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    int depth = 0;
    std::string cur;
    for (char ch : inner) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == ',' && depth == 0) {
        c.args.push_back(Trim(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!Trim(cur).empty() || !c.args.empty()) c.args.push_back(Trim(cur));
  }
  if (c.name.empty()) throw ConfigError("'" + s + "': missing name");
  return c;
}

double CallExpr::Number(std::size_t k) const {
  const std::string& a = args.at(k);
  char* end = nullptr;
  double v = std::strtod(a.c_str(), &end);
  if (a.empty() || end != a.c_str() + a.size() || !std::isfinite(v)) {
    throw ConfigError(ToString() + ": argument " + std::to_string(k + 1) +
                      " must be a number, got '" + a + "'");
  }
  return v;
}

std::size_t CallExpr::Count(std::size_t k) const {
  double v = Number(k);
  if (v < 0.0 || v != std::floor(v)) {
    throw ConfigError(ToString() + ": argument " + std::to_string(k + 1) +
                      " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

void CallExpr::ExpectArgs(std::size_t min, std::size_t max) const {
  if (args.size() < min || args.size() > max) {
    std::string want = min == max ? std::to_string(min)
                                  : std::to_string(min) + ".." + std::to_string(max);
    throw ConfigError(ToString() + ": expected " + want + " argument(s)");
  }
}

std::string CallExpr::ToString() const {
  std::string out = name;
  if (args.empty()) return out;
  out += '(';
  for (std::size_t k = 0; k < args.size(); ++k) out += (k ? ", " : "") + args[k];
  return out + ')';
}

AccessGraph BuildGraph(const std::string& spec, std::uint64_t seed) {
  CallExpr c = CallExpr::Parse(spec);
  try {
    if (c.name == "complete_bipartite") {
      c.ExpectArgs(2, 2);
      return CompleteBipartite(c.Count(0), c.Count(1));
    }
    if (c.name == "hat") {
      c.ExpectArgs(1, 1);
      return HatGraph(c.Count(0));
    }
    if (c.name == "biregular") {
      c.ExpectArgs(3, 3);
      return Biregular(c.Count(0), c.Count(1), c.Count(2));
    }
    if (c.name == "disjoint_stars") {
      c.ExpectArgs(2, 2);
      return DisjointStars(c.Count(0), c.Count(1));
    }
    if (c.name == "random") {
      c.ExpectArgs(3, 3);
      Rng rng = MakeRng(seed, 0, Stream::kGraph);
      return RandomBipartite(c.Count(0), c.Count(1), c.Number(2), rng);
    }
    if (c.name == "file") {
      c.ExpectArgs(1, 1);
      return ReadGraphFile(c.args[0]);
    }
  } catch (const GraphError& e) {
    throw ConfigError("graph " + c.ToString() + ": " + e.what());
  }
  throw ConfigError("graph '" + spec +
                    "': unknown generator; known: complete_bipartite, hat, biregular, "
                    "disjoint_stars, random, file");
}

ModelGenerator BuildModelGenerator(const std::string& reward, const std::string& scale,
                                   const AccessGraph& g) {
  const std::size_t n_items = g.num_items();
  const std::size_t n_edges = g.num_edges();
  CallExpr c = CallExpr::Parse(reward);
  ModelGenerator base;
  if (c.name == "planted") {
    c.ExpectArgs(1, 1);
    std::size_t k = c.Count(0);
    if (k < 1 || k > n_items) throw ConfigError(c.ToString() + ": k must lie in [1, n_items]");
    base = [n_items, k](Rng& rng) { return PlantedUniform(n_items, k, rng); };
  } else if (c.name == "planted_range") {
    c.ExpectArgs(3, 3);
    std::size_t first = c.Count(0);
    std::size_t count = c.Count(1);
    std::size_t k = c.Count(2);
    if (count == 0 || first + count > n_items || k < 1 || k > count) {
      throw ConfigError(c.ToString() + ": need 1 <= k <= count and first + count <= n_items");
    }
    base = [n_items, first, count, k](Rng& rng) {
      std::vector<ItemId> pool(count);
      for (std::size_t j = 0; j < count; ++j) pool[j] = static_cast<ItemId>(first + j);
      PartialShuffle(std::span<ItemId>(pool), k, rng);
      pool.resize(k);
      return RewardModel::Planted(n_items, std::move(pool));
    };
  } else if (c.name == "two_level") {
    c.ExpectArgs(3, 3);
    std::size_t k = c.Count(0);
    double high = c.Number(1);
    double low = c.Number(2);
    if (k < 1 || k > n_items) throw ConfigError(c.ToString() + ": k must lie in [1, n_items]");
    if (high < 0.0 || low < 0.0) throw ConfigError(c.ToString() + ": values must be >= 0");
    base = [n_items, k, high, low](Rng& rng) {
      std::vector<ItemId> pool(n_items);
      for (std::size_t j = 0; j < n_items; ++j) pool[j] = static_cast<ItemId>(j);
      PartialShuffle(std::span<ItemId>(pool), k, rng);
      pool.resize(k);
      return RewardModel::TwoLevel(n_items, pool, high, low);
    };
  } else if (c.name == "random_values") {
    c.ExpectArgs(0, 0);
    base = [n_items](Rng& rng) {
      std::vector<double> v(n_items);
      for (double& x : v) x = Uniform01(rng);
      return RewardModel::Universal(std::move(v));
    };
  } else if (c.name == "values") {
    c.ExpectArgs(1, 1);
    std::ifstream in(c.args[0]);
    if (!in) throw ConfigError(c.ToString() + ": cannot open values file");
    try {
      base = FixedModel(ReadUniformValues(in, n_items));
    } catch (const RewardError& e) {
      throw ConfigError(c.args[0] + ": " + e.what());
    }
  } else {
    throw ConfigError("reward '" + reward +
                      "': unknown model; known: planted, planted_range, two_level, "
                      "random_values, values");
  }
  if (Trim(scale).empty()) return base;

  CallExpr s = CallExpr::Parse(scale);
  if (s.name != "uniform_scale") {
    throw ConfigError("scale '" + scale + "': unknown; known: uniform_scale(lo, hi)");
  }
  s.ExpectArgs(2, 2);
  double lo = s.Number(0);
  double hi = s.Number(1);
  if (!(lo > 0.0 && hi >= lo)) throw ConfigError(s.ToString() + ": need 0 < lo <= hi");
  return [base, n_items, n_edges, lo, hi](Rng& rng) {
    RewardModel m = base(rng);
    std::vector<double> values(n_items);
    for (ItemId i = 0; i < n_items; ++i) values[i] = m.BaseValue(i);
    std::vector<double> scales(n_edges);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& x : scales) x = hi == lo ? lo : dist(rng);
    return RewardModel::Personalized(std::move(values), std::move(scales));
  };
}

RewardModel BuildSequences(const std::string& spec, std::size_t n_classes) {
  CallExpr c = CallExpr::Parse(spec);
  std::vector<ValueSequence> seqs;
  try {
    if (c.name == "constant") {
      c.ExpectArgs(1, 1);
      seqs.assign(n_classes, ValueSequence::Constant(c.Number(0)));
    } else if (c.name == "geometric") {
      c.ExpectArgs(2, 2);
      seqs.assign(n_classes, ValueSequence::Geometric(c.Number(0), c.Number(1)));
    } else if (c.name == "planted_position") {
      c.ExpectArgs(3, 3);
      seqs.assign(n_classes,
                  ValueSequence::PlantedPosition(c.Count(0), c.Number(1), c.Number(2)));
    } else if (c.name == "explicit") {
      c.ExpectArgs(1, 1u << 20);
      std::vector<double> v;
      for (std::size_t k = 0; k < c.args.size(); ++k) v.push_back(c.Number(k));
      seqs.assign(n_classes, ValueSequence::Explicit(std::move(v)));
    } else if (c.name == "planted_cycle") {
      c.ExpectArgs(3, 3);
      std::size_t period = c.Count(0);
      if (period == 0) throw ConfigError(c.ToString() + ": period must be >= 1");
      for (std::size_t cls = 0; cls < n_classes; ++cls) {
        std::vector<double> v(period, c.Number(2));
        v[cls % period] = c.Number(1);
        seqs.push_back(ValueSequence::Explicit(std::move(v)));
      }
    } else {
      throw ConfigError("sequences '" + spec +
                        "': unknown generator; known: constant, geometric, planted_position, "
                        "explicit, planted_cycle");
    }
    return RewardModel::Sequences(std::move(seqs));
  } catch (const RewardError& e) {
    throw ConfigError("sequences " + c.ToString() + ": " + e.what());
  }
}

ExperimentConfig ExperimentConfig::FromConfig(const Config& cfg) {
  cfg.RequireKnown({"setting", "graph", "reward", "scale", "sequences", "policies", "r", "f",
                    "delta", "p_pred", "trials", "seed", "jobs", "out", "per_trial",
                    "user_rates", "class_rates", "tau", "horizon", "warmup"});
  ExperimentConfig e;
  std::string setting = cfg.GetString("setting", "finite");
  if (setting == "finite") {
    e.setting = Setting::kFinite;
  } else if (setting == "infinite") {
    e.setting = Setting::kInfinite;
  } else {
    cfg.Fail("setting", "expected finite or infinite, got '" + setting + "'");
  }
  e.graph = cfg.GetString("graph");
  for (const std::string& p : cfg.GetList("policies", ';')) {
    try {
      PolicySpec spec = PolicySpec::Parse(p);
      bool ok = e.setting == Setting::kFinite ? spec.finite_capable() : spec.infinite_capable();
      if (!ok) cfg.Fail("policies", "'" + p + "' is not available in the " + setting + " setting");
      e.policies.push_back(std::move(spec));
    } catch (const PolicySpecError& err) {
      cfg.Fail("policies", err.what());
    }
  }
  if (e.policies.empty()) cfg.Fail("policies", "no policy given");
  e.r = cfg.GetUnsigned("r", 1);
  if (e.r == 0) cfg.Fail("r", "must be >= 1");
  std::uint64_t f = cfg.GetUnsigned("f", 1);
  if (f == 0 || f > 1000000) cfg.Fail("f", "must lie in [1, 10^6]");
  e.views_needed = static_cast<std::uint32_t>(f);
  e.delta = cfg.GetDouble("delta", 0.0);
  if (!(e.delta >= 0.0 && e.delta < 0.5)) cfg.Fail("delta", "must lie in [0, 0.5)");
  e.p_pred = cfg.GetDouble("p_pred", 1.0);
  if (!(e.p_pred >= 0.0 && e.p_pred <= 1.0)) cfg.Fail("p_pred", "must lie in [0, 1]");
  e.trials = cfg.GetUnsigned("trials", 1000);
  if (e.trials == 0) cfg.Fail("trials", "must be >= 1");
  e.seed = cfg.GetUnsigned("seed", 1);
  e.jobs = cfg.GetUnsigned("jobs", 0);
  e.out = cfg.GetString("out", ".");
  e.per_trial = cfg.GetBool("per_trial", false);
  if (e.setting == Setting::kFinite) {
    e.reward = cfg.GetString("reward");
    e.scale = cfg.GetString("scale", "");
  } else {
    e.sequences = cfg.GetString("sequences");
    e.user_rates = cfg.GetDoubles("user_rates", {1.0});
    e.class_rates = cfg.GetDoubles("class_rates", {1.0});
    e.tau = cfg.GetDouble("tau", 1.0);
    e.horizon = cfg.GetDouble("horizon", 1000.0);
    if (cfg.has("warmup")) e.warmup = cfg.GetDouble("warmup");
  }
  return e;
}

std::vector<AggregateRow> RunExperiment(const ExperimentConfig& cfg, std::ostream* log) {
  if (!fs::is_directory(cfg.out)) {
    throw ConfigError("output directory '" + cfg.out + "' does not exist");
  }
  AccessGraph g = BuildGraph(cfg.graph, cfg.seed);
  std::vector<AggregateRow> rows;

  std::ofstream agg(fs::path(cfg.out) / "aggregate.csv");
  std::ofstream timing(fs::path(cfg.out) / "timing.csv");
  if (!agg || !timing) throw ConfigError("cannot write into '" + cfg.out + "'");
  agg << kAggregateCsvHeader << '\n';
  timing << "policy,seconds\n";

  for (std::size_t k = 0; k < cfg.policies.size(); ++k) {
    const PolicySpec& spec = cfg.policies[k];
    AggregateRow row;
    row.policy = spec.ToString();
    std::ofstream trial_csv;
    if (cfg.per_trial) {
      trial_csv.open(fs::path(cfg.out) / ("trials_" + std::to_string(k) + ".csv"));
      if (!trial_csv) throw ConfigError("cannot write per-trial CSV into '" + cfg.out + "'");
    }
    auto start = std::chrono::steady_clock::now();
    std::uint32_t f = cfg.views_needed;
    double delta = cfg.delta;
    if (cfg.setting == Setting::kFinite) {
      FiniteEstimateRequest req;
      req.graph = &g;
      req.model = BuildModelGenerator(cfg.reward, cfg.scale, g);
      req.policy = MakeFinitePolicyMaker(spec, g);
      req.options.r = cfg.r;
      req.options.views_needed = f;
      req.options.delta = delta;
      req.options.p_pred = cfg.p_pred;
      req.trials = cfg.trials;
      req.seed = cfg.seed;
      req.jobs = cfg.jobs;
      req.policy_label = row.policy;
      if (cfg.per_trial) {
        trial_csv << kFiniteTrialCsvHeader << '\n';
        req.trial_csv = &trial_csv;
      }
      row.estimate = EstimateGammaFinite(req);
    } else {
      RewardModel model = BuildSequences(cfg.sequences, g.num_items());
      InfiniteEstimateRequest req;
      req.graph = &g;
      req.config.user_rates = cfg.user_rates;
      req.config.class_rates = cfg.class_rates;
      req.config.tau = cfg.tau;
      req.config.horizon = cfg.horizon;
      req.config.warmup = cfg.warmup;
      req.config.r = cfg.r;
      req.config.views_needed = f;
      req.config.delta = delta;
      ApplyPolicyParameters(spec, req.config);
      f = req.config.views_needed;
      delta = req.config.delta;
      try {
        req.config.Validate(g);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("infinite setting: ") + e.what());
      }
      req.model = &model;
      req.policy = MakeVisitPolicyMaker(spec);
      req.trials = cfg.trials;
      req.seed = cfg.seed;
      req.jobs = cfg.jobs;
      if (cfg.per_trial) {
        trial_csv << kVisitCsvHeader << '\n';
        req.visit_csv = &trial_csv;
      }
      InfiniteEstimate est = EstimateGammaInfinite(req);
      row.estimate = est.ratio;
      row.mean_latest_size = est.latest_size.mean();
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const RatioEstimate& e = row.estimate;
    agg << '"' << row.policy << '"' << ','
        << (cfg.setting == Setting::kFinite ? "finite" : "infinite") << ',' << cfg.r << ','
        << f << ',' << FormatNumber(delta) << ',' << cfg.trials << ',' << cfg.seed << ','
        << FormatNumber(e.gamma) << ',' << FormatNumber(e.half_width) << ','
        << (e.argmin ? std::to_string(*e.argmin) : "") << ',' << FormatNumber(e.pooled_mean)
        << ',' << FormatNumber(e.pooled_half_width) << ',' << e.excluded_users << ','
        << (row.mean_latest_size ? FormatNumber(*row.mean_latest_size) : "") << '\n';
    timing << '"' << row.policy << '"' << ',' << FormatNumber(row.seconds) << '\n';
    if (log != nullptr) {
      *log << row.policy << ": gamma=" << FormatNumber(e.gamma) << " +/- "
           << FormatNumber(e.half_width) << " (" << FormatNumber(row.seconds) << " s)\n";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ocf::tools
