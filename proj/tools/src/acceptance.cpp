#include "ocf/tools/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "ocf/access_graph.hpp"
#include "ocf/metrics.hpp"
#include "ocf/oracles.hpp"
#include "ocf/partitioning.hpp"
#include "ocf/policy_spec.hpp"
#include "ocf/sim_finite.hpp"
#include "ocf/sim_infinite.hpp"
#include "ocf/tools/experiment.hpp"

namespace ocf::tools {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", x);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Estimate(const RatioEstimate& e) {
  return "gamma=" + Num(e.gamma) + " +/- " + Num(e.half_width) + " (" +
         std::to_string(e.trials) + " trials)";
}

class Runner {
 public:
  explicit Runner(const AcceptanceOptions& opt) : opt_(opt) {}

  std::size_t Trials(std::size_t standard) const { return opt_.trials.value_or(standard); }
  std::uint64_t Seed(std::uint64_t salt) const { return Mix64(opt_.seed ^ Mix64(salt)); }

  RatioEstimate Finite(const AccessGraph& g, ModelGenerator model, const std::string& policy,
                       std::size_t r, std::size_t trials, std::uint64_t seed) const {
    FiniteEstimateRequest req;
    req.graph = &g;
    req.model = std::move(model);
    req.policy = MakeFinitePolicyMaker(PolicySpec::Parse(policy), g);
    req.options.r = r;
    req.trials = trials;
    req.seed = seed;
    req.jobs = opt_.jobs;
    return EstimateGammaFinite(req);
  }

  InfiniteEstimate Infinite(const AccessGraph& g, InfiniteConfig cfg, const RewardModel& model,
                            const std::string& policy, std::size_t trials,
                            std::uint64_t seed) const {
    PolicySpec spec = PolicySpec::Parse(policy);
    ApplyPolicyParameters(spec, cfg);
    InfiniteEstimateRequest req;
    req.graph = &g;
    req.config = cfg;
    req.model = &model;
    req.policy = MakeVisitPolicyMaker(spec);
    req.trials = trials;
    req.seed = seed;
    req.jobs = opt_.jobs;
    return EstimateGammaInfinite(req);
  }

  const AcceptanceOptions& opt() const { return opt_; }

 private:
  const AcceptanceOptions& opt_;
};

ModelGenerator PlantedModel(std::size_t n_items, std::size_t k) {
  return [n_items, k](Rng& rng) { return PlantedUniform(n_items, k, rng); };
}

// One unit item per user, uniformly among that user's items.
ModelGenerator PlantedPerUser(const AccessGraph& g) {
  return [&g](Rng& rng) {
    std::vector<ItemId> planted;
    for (UserId u = 0; u < g.num_users(); ++u) {
      auto items = g.items_of(u);
      planted.push_back(items[UniformIndex(rng, items.size())]);
    }
    return RewardModel::Planted(g.num_items(), std::move(planted));
  };
}

ModelGenerator HatPrivate(std::size_t n) {
  std::vector<ItemId> planted(n);
  std::iota(planted.begin(), planted.end(), ItemId{0});
  return FixedModel(RewardModel::Planted(2 * n, std::move(planted)));
}

ModelGenerator HatShared(std::size_t n) {
  return [n](Rng& rng) {
    return RewardModel::Planted(2 * n, {static_cast<ItemId>(n + UniformIndex(rng, n))});
  };
}

// One uniformly chosen item at `high`, every other item at `low`.
ModelGenerator SingleHigh(std::size_t n_items, double high, double low) {
  return [n_items, high, low](Rng& rng) {
    const ItemId top = static_cast<ItemId>(UniformIndex(rng, n_items));
    return RewardModel::TwoLevel(n_items, std::span<const ItemId>(&top, 1), high, low);
  };
}

// ---------------------------------------------------------------------------

CriterionResult Oracles(const Runner&) {
  CriterionResult res{1, "oracles", "exact recursion, closed form and policy search agree", {}, 0};
  auto start = Clock::now();

  auto table = RdetTable(50, 50);
  std::size_t mismatches = 0;
  for (std::size_t u = 1; u <= 50; ++u) {
    for (std::size_t i = 1; i <= 50; ++i) {
      if (table[u - 1][i - 1] != RdetClosedForm(u, i)) ++mismatches;
    }
  }
  res.checks.push_back({"recursion == closed form, 1..50 x 1..50", mismatches == 0,
                        std::to_string(mismatches) + " mismatches in 2500 cells"});

  std::size_t brute_mismatches = 0;
  for (std::size_t u = 1; u <= 4; ++u) {
    for (std::size_t i = 1; i <= 5; ++i) {
      if (PolicyStateBruteforce(u, i) != table[u - 1][i - 1]) ++brute_mismatches;
    }
  }
  res.checks.push_back({"policy search == recursion, users <= 4, items <= 5",
                        brute_mismatches == 0,
                        std::to_string(brute_mismatches) + " mismatches in 20 sizes"});

  bool spots = RdetRecursion(2, 2) == Rational(3, 2) && RdetRecursion(1, 3) == Rational(1, 3) &&
               RdetRecursion(3, 2) == Rational(5, 2) &&
               RdetRecursion(4, 10) == RdetClosedForm(4, 10);
  res.checks.push_back({"spot values", spots,
                        "R(2,2)=" + RdetRecursion(2, 2).str() + " R(1,3)=" +
                            RdetRecursion(1, 3).str() + " R(3,2)=" + RdetRecursion(3, 2).str()});

  double secs = Seconds(start);
  res.checks.push_back({"runtime < 60 s", secs < 60.0, Num(secs) + " s"});
  return res;
}

CriterionResult RedBlue(const Runner&) {
  CriterionResult res{2, "redblue", "red-run expectation bound and exact small cases", {}, 0};
  auto start = Clock::now();
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::size_t formula_misses = 0;
  std::size_t argmax_misses = 0;
  Rational worst_slack = 1000;
  for (std::size_t total = 1; total <= 14; ++total) {
    for (std::size_t blues = 0; blues < total; ++blues) {
      const std::size_t reds = total - blues;
      RedBlueResult rb = RedBlueExact(reds, blues);
      ++cases;
      Rational slack = RedBlueBound(reds, blues) - rb.max;
      if (slack < 0) ++violations;
      worst_slack = std::min(worst_slack, slack);
      if (blues == 1) {
        if (rb.argmax != (reds + 1) / 2 - 1) ++argmax_misses;
        if (reds % 2 == 1 && rb.max != Rational(3 * reds + 1, 4)) ++formula_misses;
      }
    }
  }
  res.checks.push_back({"N(R,B) <= 4R/(B+1) + 2 for R+B <= 14", violations == 0,
                        std::to_string(violations) + " violations in " + std::to_string(cases) +
                            " cases, least slack " + Num(worst_slack.convert_to<double>())});
  Rational n31 = RedBlueExact(3, 1).max;
  Rational n51 = RedBlueExact(5, 1).max;
  res.checks.push_back({"N(3,1) = 5/2 and N(5,1) = 4", n31 == Rational(5, 2) && n51 == 4,
                        "N(3,1)=" + n31.str() + " N(5,1)=" + n51.str()});
  res.checks.push_back({"B = 1: N = (3R+1)/4 for odd R, max at red ceil(R/2)",
                        formula_misses == 0 && argmax_misses == 0,
                        std::to_string(formula_misses) + " formula misses, " +
                            std::to_string(argmax_misses) + " argmax misses"});
  double secs = Seconds(start);
  res.checks.push_back({"runtime < 60 s", secs < 60.0, Num(secs) + " s"});
  return res;
}

CriterionResult PartitionExploration(const Runner& run) {
  CriterionResult res{3, "bpexp", "semi-matching exploration lower bound", {}, 0};
  {
    AccessGraph g = CompleteBipartite(16, 16);
    RatioEstimate e =
        run.Finite(g, PlantedModel(16, 1), "bpexp", 1, run.Trials(100000), run.Seed(31));
    const double target = 1.0 / 8.0;
    res.checks.push_back({"complete 16x16, r=1: gamma >= 1/8 - CI",
                          e.gamma >= target - e.half_width,
                          Estimate(e) + ", target " + Num(target)});
  }
  {
    AccessGraph g = DisjointStars(8, 4);
    RatioEstimate e =
        run.Finite(g, PlantedPerUser(g), "bpexp", 2, run.Trials(100000), run.Seed(32));
    const double target = std::min(2.0 / (8.0 * 4.0), 0.25);
    res.checks.push_back({"disjoint stars 8x4, r=2: gamma >= 1/16 - CI",
                          e.gamma >= target - e.half_width,
                          Estimate(e) + ", target " + Num(target)});
  }
  return res;
}

constexpr double kInverseDegreeFloor = 1.0 / (16.0 * 2.718281828459045);

CriterionResult InverseDegreeExploration(const Runner& run) {
  CriterionResult res{4, "idexp", "inverse-degree exploration lower bound on the hat graph", {}, 0};
  const std::size_t n = 32;
  AccessGraph g = HatGraph(n);
  GraphStats stats = ComputeStats(g);
  res.checks.push_back({"Z_max = 2", std::abs(stats.z_max - 2.0) < 1e-12, Num(stats.z_max)});
  struct Placement {
    const char* name;
    ModelGenerator model;
  };
  Placement placements[] = {{"private items", HatPrivate(n)}, {"one shared item", HatShared(n)}};
  std::uint64_t salt = 41;
  for (auto& p : placements) {
    RatioEstimate e = run.Finite(g, p.model, "idexp", 1, run.Trials(100000), run.Seed(salt++));
    res.checks.push_back({std::string("hat(32) ") + p.name + ": gamma >= 1/(16e) - CI",
                          e.gamma >= kInverseDegreeFloor - e.half_width,
                          Estimate(e) + ", target " + Num(kInverseDegreeFloor)});
  }
  return res;
}

AccessGraph LatestItemGraph() { return Biregular(8, 16, 4); }

InfiniteConfig LatestItemConfig(std::size_t r) {
  InfiniteConfig cfg;
  cfg.tau = 1.0;
  cfg.horizon = 1000.0;
  cfg.r = r;
  return cfg;
}

const char* kSequenceSpecs[] = {"geometric(0.5, 0.5)", "planted_cycle(4, 1, 0)"};

CriterionResult LatestItemExploration(const Runner& run) {
  CriterionResult res{5, "ulexp", "latest-item exploration lower bound", {}, 0};
  AccessGraph g = LatestItemGraph();
  res.checks.push_back({"Z_max = 2", std::abs(ComputeStats(g).z_max - 2.0) < 1e-12,
                        Num(ComputeStats(g).z_max)});
  std::uint64_t salt = 51;
  for (const char* seq : kSequenceSpecs) {
    RewardModel model = BuildSequences(seq, g.num_items());
    InfiniteEstimate e =
        run.Infinite(g, LatestItemConfig(1), model, "ulexp", run.Trials(50), run.Seed(salt++));
    const double target = 1.0 / 48.0;
    res.checks.push_back({std::string(seq) + ": gamma >= 1/48 - CI",
                          e.ratio.gamma >= target - e.ratio.half_width,
                          Estimate(e.ratio) + ", target " + Num(target)});
    res.checks.push_back({std::string(seq) + ": mean |L(s)| <= 12", e.latest_size.mean() <= 12.0,
                          "mean " + Num(e.latest_size.mean()) + " over " +
                              std::to_string(e.latest_size.count()) + " visits"});
  }
  return res;
}

const std::vector<std::string>& FinitePolicies() {
  static const std::vector<std::string> v = {
      "bpexp",
      "idexp",
      "uniform_explore",
      "degree_power(-0.5)",
      "degree_power(-1.5)",
      "exploit_when_possible(uniform_explore)",
      "exploit_above_threshold(0.5, uniform_explore)",
  };
  return v;
}

CriterionResult UpperBound(const Runner& run) {
  CriterionResult res{6, "upper_bound", "no policy beats the complete-graph ceiling", {}, 0};
  struct Case {
    std::size_t users, items, r;
  };
  for (Case c : {Case{4, 32, 1}, Case{4, 64, 2}}) {
    AccessGraph g = CompleteBipartite(c.users, c.items);
    const double ceiling = static_cast<double>(c.r * c.users) / (2.0 * c.items) + 0.05;
    std::uint64_t salt = 600 + c.r * 10;
    double worst = 0.0;
    std::string worst_policy;
    std::size_t over = 0;
    std::string detail;
    for (const std::string& p : FinitePolicies()) {
      RatioEstimate e = run.Finite(g, PlantedModel(c.items, c.r), p, c.r, run.Trials(10000),
                                   run.Seed(salt++));
      if (e.gamma > ceiling) {
        ++over;
        detail += " " + p + "=" + Num(e.gamma);
      }
      if (e.gamma >= worst) {
        worst = e.gamma;
        worst_policy = p;
      }
    }
    res.checks.push_back(
        {"complete " + std::to_string(c.users) + "x" + std::to_string(c.items) +
             ", r=" + std::to_string(c.r) + ": every policy gamma <= " + Num(ceiling),
         over == 0,
         "largest " + worst_policy + " gamma=" + Num(worst) + ", " +
             std::to_string(FinitePolicies().size()) + " policies" +
             (over ? ", over:" + detail : "")});
  }
  return res;
}

CriterionResult DegreePower(const Runner& run) {
  CriterionResult res{7, "degree_power", "degree-power exploration decays on hat graphs", {}, 0};
  struct Family {
    double exponent;
    HatPlacement placement;
    const char* placement_name;
  };
  const std::size_t sizes[] = {16, 64, 256};
  const std::size_t trials[] = {20000, 20000, 6000};
  std::uint64_t salt = 700;
  for (Family f : {Family{-0.5, HatPlacement::kPrivateItems, "private items"},
                   Family{-1.5, HatPlacement::kOneSharedItem, "one shared item"}}) {
    const std::string policy = "degree_power(" + Num(f.exponent) + ")";
    std::vector<RatioEstimate> est;
    std::string detail;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t n = sizes[k];
      AccessGraph g = HatGraph(n);
      ModelGenerator model =
          f.placement == HatPlacement::kPrivateItems ? HatPrivate(n) : HatShared(n);
      est.push_back(run.Finite(g, model, policy, 1, run.Trials(trials[k]), run.Seed(salt++)));
      NegativeBound nb = NegativeBoundExact(n, f.exponent, f.placement);
      detail += (k ? "; " : "") + std::string("n=") + std::to_string(n) + " gamma=" +
                Num(est[k].gamma) + "+/-" + Num(est[k].half_width) + " idealized=" +
                Num(nb.expected_ratio());
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < 3; ++k) {
      if (!(est[k].gamma < est[k - 1].gamma - (est[k].half_width + est[k - 1].half_width))) {
        decreasing = false;
      }
    }
    res.checks.push_back({policy + ", " + f.placement_name + ": strictly decreasing in n",
                          decreasing, detail});

    bool above = true;
    std::string id_detail;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t n = sizes[k];
      AccessGraph g = HatGraph(n);
      ModelGenerator model =
          f.placement == HatPlacement::kPrivateItems ? HatPrivate(n) : HatShared(n);
      RatioEstimate e = run.Finite(g, model, "idexp", 1, run.Trials(trials[k]), run.Seed(salt++));
      if (e.gamma < kInverseDegreeFloor - e.half_width) above = false;
      id_detail += (k ? "; " : "") + std::string("n=") + std::to_string(n) + " gamma=" +
                   Num(e.gamma) + "+/-" + Num(e.half_width);
    }
    res.checks.push_back({std::string("idexp, ") + f.placement_name + ": gamma >= " +
                              Num(kInverseDegreeFloor) + " - CI",
                          above, id_detail});
  }
  return res;
}

CriterionResult ExploitRules(const Runner& run) {
  CriterionResult res{8, "exploit_rules", "deterministic exploit rules match their traps", {}, 0};
  std::uint64_t salt = 800;
  for (std::size_t n : {10u, 100u}) {
    AccessGraph g = CompleteBipartite(n, n);
    const double nd = static_cast<double>(n);
    {
      const double delta = 0.01;
      const double target = delta + (1.0 - delta) / nd;
      RatioEstimate e = run.Finite(g, SingleHigh(n, 1.0, delta),
                                   "exploit_when_possible(uniform_explore)", 1,
                                   run.Trials(20000), run.Seed(salt++));
      res.checks.push_back({"exploit_when_possible, n=" + std::to_string(n) +
                                ": |gamma - (d + (1-d)/n)| <= 2 CI",
                            std::abs(e.gamma - target) <= 2.0 * e.half_width,
                            Estimate(e) + ", target " + Num(target)});
    }
    {
      const double delta = 0.1;
      const double target = 1.0 / nd;
      RatioEstimate e = run.Finite(g, SingleHigh(n, delta, 0.0),
                                   "exploit_above_threshold(0.5, uniform_explore)", 1,
                                   run.Trials(20000), run.Seed(salt++));
      res.checks.push_back({"exploit_above_threshold(0.5), n=" + std::to_string(n) +
                                ": |gamma - 1/n| <= 2 CI",
                            std::abs(e.gamma - target) <= 2.0 * e.half_width,
                            Estimate(e) + ", target " + Num(target)});
    }
  }
  return res;
}

// Per-visit ratios thinned to the first visit after each point of a grid with
// spacing 3 tau, so that retained samples are nearly independent.
std::vector<double> ThinnedRatios(const AccessGraph& g, const InfiniteConfig& cfg,
                                  const RewardModel& model, const std::string& policy,
                                  std::size_t trials, std::uint64_t seed) {
  PolicySpec spec = PolicySpec::Parse(policy);
  InfiniteConfig c = cfg;
  ApplyPolicyParameters(spec, c);
  VisitPolicyMaker maker = MakeVisitPolicyMaker(spec);
  std::vector<double> out;
  const double spacing = 3.0 * c.tau;
  for (std::size_t t = 0; t < trials; ++t) {
    auto p = maker();
    InfiniteRun run = RunInfinite(g, c, model, *p, seed, t);
    double next = c.warmup_time();
    for (const VisitRecord& v : run.visits) {
      if (v.time < next) continue;
      next = std::floor(v.time / spacing) * spacing + spacing;
      if (auto r = v.ratio()) out.push_back(*r);
    }
  }
  return out;
}

CriterionResult MultiViewExploration(const Runner& run) {
  CriterionResult res{9, "ulexp_f", "multi-view latest-item exploration", {}, 0};
  AccessGraph g = LatestItemGraph();
  const double target = (1.0 / 27.0) * (2.0 / 12.0) * (2.0 / 12.0);
  std::uint64_t salt = 900;
  for (const char* seq : kSequenceSpecs) {
    RewardModel model = BuildSequences(seq, g.num_items());
    InfiniteEstimate e = run.Infinite(g, LatestItemConfig(2), model, "ulexp_f(2, 0)",
                                      run.Trials(50), run.Seed(salt++));
    res.checks.push_back({std::string(seq) + ", f=2, r=2: gamma >= " + Num(target) + " - CI",
                          e.ratio.gamma >= target - e.ratio.half_width,
                          Estimate(e.ratio) + ", target " + Num(target)});
  }
  RewardModel model = BuildSequences(kSequenceSpecs[0], g.num_items());
  std::vector<double> a =
      ThinnedRatios(g, LatestItemConfig(1), model, "ulexp_f(1)", run.Trials(50), run.Seed(salt++));
  std::vector<double> b =
      ThinnedRatios(g, LatestItemConfig(1), model, "ulexp", run.Trials(50), run.Seed(salt++));
  KsResult ks = KsTwoSample(a, b);
  res.checks.push_back({"f=1 matches the single-view policy: KS p > 0.01", ks.p_value > 0.01,
                        "D=" + Num(ks.statistic) + " p=" + Num(ks.p_value) + " (" +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                            " thinned visits)"});
  return res;
}

CriterionResult PartitionBalance(const Runner& run) {
  CriterionResult res{10, "partition_bound", "greedy neighborhood partitions stay balanced", {}, 0};
  // Sum of Z(u) over users is n_items, so n_items >= 2 n_users gives
  // Z_max >= 2 >= r/2 for every r here. Below that a lone item of weight 1
  // can exceed 2 Z_max / r, and only max(2 Z_max / r, 1) can hold.
  struct Tally {
    std::size_t pairs = 0, violations = 0, capped_violations = 0;
    double least_slack = 1e300, least_capped_slack = 1e300;
  };
  auto sweep = [&](std::uint64_t salt, bool enough_items) {
    Rng rng(run.Seed(salt));
    Tally t;
    for (std::size_t k = 0; k < 100; ++k) {
      const std::size_t n_users = 1 + UniformIndex(rng, 64);
      const std::size_t n_items = enough_items ? 2 * n_users + UniformIndex(rng, 2 * n_users + 1)
                                               : 1 + UniformIndex(rng, 64);
      const double p = k % 2 == 0 ? 0.1 : 0.5;
      AccessGraph g = RandomBipartite(n_users, n_items, p, rng);
      for (std::size_t r : {1u, 2u, 4u}) {
        PartitionBoundReport rep = VerifyPartitionBound(g, r);
        ++t.pairs;
        t.violations += rep.violations;
        t.capped_violations += rep.capped_violations;
        t.least_slack = std::min(t.least_slack, rep.slack());
        t.least_capped_slack = std::min(t.least_capped_slack, rep.capped_slack());
      }
    }
    return t;
  };
  Tally a = sweep(1000, true);
  res.checks.push_back({"max set weight <= 2 Z_max / r, 100 random graphs with n_items >= 2 "
                        "n_users, r in {1,2,4}",
                        a.violations == 0,
                        std::to_string(a.violations) + " violations in " +
                            std::to_string(a.pairs) + " graph/r pairs, least slack " +
                            Num(a.least_slack)});
  Tally b = sweep(1001, false);
  res.checks.push_back({"max set weight <= max(2 Z_max / r, 1), 100 random graphs with "
                        "1..64 items, r in {1,2,4}",
                        b.capped_violations == 0,
                        std::to_string(b.capped_violations) + " violations in " +
                            std::to_string(b.pairs) + " graph/r pairs, least slack " +
                            Num(b.least_capped_slack) + "; uncapped 2 Z_max / r exceeded in " +
                            std::to_string(b.violations) + " sets"});
  return res;
}

// Exhaustive minimum makespan, independent of the flow-based solver.
std::size_t ExhaustiveMakespan(const AccessGraph& g) {
  std::vector<std::size_t> loads(g.num_users(), 0);
  std::size_t best = g.num_items() + 1;
  std::function<void(ItemId, std::size_t)> go = [&](ItemId i, std::size_t cur) {
    if (cur >= best) return;
    if (i == g.num_items()) {
      best = cur;
      return;
    }
    for (UserId u : g.users_of(i)) {
      ++loads[u];
      go(i + 1, std::max(cur, loads[u]));
      --loads[u];
    }
  };
  go(0, 0);
  return best;
}

std::size_t FiniteFuzz(const Runner& run, std::size_t target_arrivals, std::size_t& arrivals,
                       std::string& first_problem) {
  Rng rng(run.Seed(1100));
  std::vector<std::string> policies = FinitePolicies();
  policies.push_back("genie");
  policies.push_back("exploit_when_possible(idexp)");
  policies.push_back("exploit_above_threshold(0.3, bpexp)");
  policies.push_back("degree_power(1)");
  std::size_t violations = 0;
  auto note = [&](const std::string& what) {
    ++violations;
    if (first_problem.empty()) first_problem = what;
  };
  for (std::size_t round = 0; arrivals < target_arrivals; ++round) {
    const std::size_t n_users = 1 + UniformIndex(rng, 12);
    const std::size_t n_items = 1 + UniformIndex(rng, 16);
    const double p = std::array<double, 3>{0.15, 0.4, 0.8}[UniformIndex(rng, 3)];
    AccessGraph g = RandomBipartite(n_users, n_items, p, rng);
    const std::size_t r = 1 + UniformIndex(rng, 4);
    const auto f = static_cast<std::uint32_t>(1 + UniformIndex(rng, 3));
    const double delta = 0.4 * Uniform01(rng);
    const double p_pred = UniformIndex(rng, 2) == 0 ? 1.0 : 0.7;
    std::vector<double> values(n_items);
    for (double& v : values) v = UniformIndex(rng, 3) == 0 ? 0.0 : Uniform01(rng);
    RewardModel model = RewardModel::Universal(values);
    const std::string& name = policies[round % policies.size()];
    auto policy = MakeFinitePolicyMaker(PolicySpec::Parse(name), g)();

    ValueOracle oracle(f, delta, rng());
    FiniteContext ctx(g, model, oracle, r, p_pred);
    for (UserId u : ArrivalOrder(n_users, run.Seed(1101), round)) {
      ++arrivals;
      Recommendation rec;
      try {
        rec = policy->Recommend(ctx, u, rng);
      } catch (const std::exception& e) {
        note(name + " threw: " + e.what());
        continue;
      }
      auto items = g.items_of(u);
      std::string where = name + " round " + std::to_string(round) + " user " + std::to_string(u);
      if (rec.size() > r) note(where + ": more than r items");
      if (rec.kinds.size() != rec.items.size()) note(where + ": tag count mismatch");
      std::vector<ItemId> sorted = rec.items;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        note(where + ": repeated item");
      }
      for (std::size_t k = 0; k < rec.items.size(); ++k) {
        ItemId i = rec.items[k];
        if (!std::binary_search(items.begin(), items.end(), i)) {
          note(where + ": item outside the neighborhood");
        } else if (k < rec.kinds.size() && rec.kinds[k] == SlotKind::kExploit && name != "genie" &&
                   !ctx.explored(i)) {
          note(where + ": exploit slot holds an unexplored item");
        }
      }
      ctx.RecordPresentation(rec);
    }
  }
  return violations;
}

std::size_t InfiniteFuzz(const Runner& run, std::size_t target_visits, std::size_t& visits,
                         std::string& first_problem) {
  Rng rng(run.Seed(1150));
  const char* policies[] = {"ulexp", "ulexp_f(2)", "ulexp_f(3, 0.2)", "genie"};
  std::size_t violations = 0;
  auto note = [&](const std::string& what) {
    ++violations;
    if (first_problem.empty()) first_problem = what;
  };
  for (std::size_t round = 0; visits < target_visits; ++round) {
    const std::size_t n_users = 1 + UniformIndex(rng, 6);
    const std::size_t n_classes = 1 + UniformIndex(rng, 8);
    AccessGraph g = RandomBipartite(n_users, n_classes, 0.5, rng);
    InfiniteConfig cfg;
    cfg.user_rates = {0.5 + 2.0 * Uniform01(rng)};
    cfg.class_rates = {0.5 + 2.0 * Uniform01(rng)};
    cfg.tau = 0.5 + 3.0 * Uniform01(rng);
    cfg.horizon = 200.0;
    cfg.warmup = 0.0;
    cfg.r = 1 + UniformIndex(rng, 3);
    std::vector<ValueSequence> seqs;
    for (std::size_t c = 0; c < n_classes; ++c) {
      std::vector<double> v(1 + UniformIndex(rng, 5));
      for (double& x : v) x = Uniform01(rng);
      seqs.push_back(ValueSequence::Explicit(std::move(v)));
    }
    RewardModel model = RewardModel::Sequences(std::move(seqs));
    const char* name = policies[round % std::size(policies)];
    PolicySpec spec = PolicySpec::Parse(name);
    ApplyPolicyParameters(spec, cfg);
    auto policy = MakeVisitPolicyMaker(spec)();
    InfiniteRun result;
    try {
      result = RunInfinite(g, cfg, model, *policy, run.Seed(1151), round, true);
    } catch (const std::exception& e) {
      note(std::string(name) + " threw: " + e.what());
      continue;
    }
    for (const VisitRecord& v : result.visits) {
      ++visits;
      std::string where = std::string(name) + " round " + std::to_string(round);
      if (v.shown.size() > cfg.r) note(where + ": more than r items");
      std::vector<LiveItemId> sorted = v.shown;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        note(where + ": repeated item");
      }
      if (v.reward > v.optimal * (1.0 + 1e-12) + 1e-300) note(where + ": reward above optimum");
    }
  }
  return violations;
}

bool SameBytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary);
  std::ifstream fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return sa == sb;
}

CriterionResult Properties(const Runner& run) {
  CriterionResult res{11, "properties", "randomized property suites", {}, 0};

  {
    std::size_t arrivals = 0;
    std::size_t visits = 0;
    std::string problem;
    std::size_t v = FiniteFuzz(run, 100000, arrivals, problem);
    v += InfiniteFuzz(run, 100000, visits, problem);
    res.checks.push_back({"recommendation validity fuzzing, every policy", v == 0,
                          std::to_string(v) + " violations over " + std::to_string(arrivals) +
                              " arrivals and " + std::to_string(visits) + " visits" +
                              (problem.empty() ? "" : "; first: " + problem)});
  }

  {
    Rng rng(run.Seed(1200));
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < 50; ++k) {
      const std::size_t n_users = 1 + UniformIndex(rng, 4);
      const std::size_t n_items = 1 + UniformIndex(rng, 10);
      AccessGraph g = RandomBipartite(n_users, n_items, 0.2 + 0.6 * Uniform01(rng), rng);
      SemiMatching m = BalancedSemiMatching(g);
      bool valid = m.owner.size() == n_items;
      std::vector<std::size_t> loads(n_users, 0);
      for (ItemId i = 0; valid && i < n_items; ++i) {
        valid = g.has_edge(m.owner[i], i);
        if (valid) ++loads[m.owner[i]];
      }
      const std::size_t realized = *std::max_element(loads.begin(), loads.end());
      if (!valid || realized != m.max_load || m.max_load != ExhaustiveMakespan(g)) ++mismatches;
    }
    res.checks.push_back({"semi-matching makespan equals exhaustive search on 50 graphs",
                          mismatches == 0, std::to_string(mismatches) + " mismatches"});
  }

  {
    const std::size_t n = 8;
    const std::size_t trials = 40000;
    const std::pair<UserId, UserId> pairs[] = {{0, 1}, {0, 7}, {3, 4}};
    std::size_t before[3] = {0, 0, 0};
    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<UserId> order = ArrivalOrder(n, run.Seed(1300), t);
      std::vector<std::size_t> pos(n);
      for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
      for (std::size_t j = 0; j < 3; ++j) before[j] += pos[pairs[j].first] < pos[pairs[j].second];
    }
    const double sigma = std::sqrt(0.25 / static_cast<double>(trials));
    bool ok = true;
    std::string detail;
    for (std::size_t j = 0; j < 3; ++j) {
      double freq = static_cast<double>(before[j]) / static_cast<double>(trials);
      ok = ok && std::abs(freq - 0.5) <= 3.0 * sigma;
      detail += (j ? " " : "") + std::string("(") + std::to_string(pairs[j].first) + "," +
                std::to_string(pairs[j].second) + ")=" + Num(freq);
    }
    res.checks.push_back({"arrival order: P(a before b) = 1/2 +/- 3 sigma", ok,
                          detail + ", sigma " + Num(sigma)});
  }

  {
    fs::path root = fs::temp_directory_path() /
                    ("ocf_determinism_" +
                     std::to_string(Clock::now().time_since_epoch().count()));
    bool identical = true;
    std::string detail;
    try {
      ExperimentConfig fin;
      fin.setting = Setting::kFinite;
      fin.graph = "random(10, 20, 0.3)";
      fin.reward = "planted(2)";
      fin.policies = {PolicySpec::Parse("bpexp"), PolicySpec::Parse("idexp"),
                      PolicySpec::Parse("exploit_when_possible(uniform_explore)")};
      fin.r = 2;
      fin.trials = 600;
      fin.seed = run.Seed(1400);
      fin.per_trial = true;

      ExperimentConfig inf;
      inf.setting = Setting::kInfinite;
      inf.graph = "biregular(4, 8, 2)";
      inf.sequences = "geometric(1, 0.9)";
      inf.policies = {PolicySpec::Parse("ulexp"), PolicySpec::Parse("ulexp_f(2)")};
      inf.horizon = 60.0;
      inf.trials = 20;
      inf.seed = run.Seed(1401);
      inf.per_trial = true;

      std::size_t compared = 0;
      for (ExperimentConfig* cfg : {&fin, &inf}) {
        fs::path dirs[2];
        for (std::size_t k = 0; k < 2; ++k) {
          dirs[k] = root / ((cfg == &fin ? "finite_" : "infinite_") + std::to_string(k));
          fs::create_directories(dirs[k]);
          cfg->out = dirs[k].string();
          cfg->jobs = k == 0 ? 1 : 3;
          RunExperiment(*cfg, nullptr);
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
          const std::string name = entry.path().filename().string();
          if (name == "timing.csv") continue;
          ++compared;
          if (!SameBytes(entry.path(), dirs[1] / name)) {
            identical = false;
            detail += " differs: " + name;
          }
        }
      }
      detail = std::to_string(compared) + " files compared across 1 and 3 workers" + detail;
    } catch (const std::exception& e) {
      identical = false;
      detail = std::string("error: ") + e.what();
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    res.checks.push_back({"seeded runs give byte-identical CSV", identical, detail});
  }
  return res;
}

using Suite = CriterionResult (*)(const Runner&);

const std::vector<std::pair<std::string, Suite>>& Suites() {
  static const std::vector<std::pair<std::string, Suite>> v = {
      {"oracles", Oracles},
      {"redblue", RedBlue},
      {"bpexp", PartitionExploration},
      {"idexp", InverseDegreeExploration},
      {"ulexp", LatestItemExploration},
      {"upper_bound", UpperBound},
      {"degree_power", DegreePower},
      {"exploit_rules", ExploitRules},
      {"ulexp_f", MultiViewExploration},
      {"partition_bound", PartitionBalance},
      {"properties", Properties},
  };
  return v;
}

}  // namespace

bool CriterionResult::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& AcceptanceSuites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : Suites()) v.push_back(s.first);
    v.push_back("all");
    return v;
  }();
  return names;
}

std::vector<CriterionResult> RunAcceptance(const std::string& suite,
                                           const AcceptanceOptions& opt) {
  std::vector<Suite> chosen;
  for (const auto& s : Suites()) {
    if (suite == "all" || suite == s.first) chosen.push_back(s.second);
  }
  if (chosen.empty()) {
    std::string known;
    for (const auto& n : AcceptanceSuites()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown suite '" + suite + "'; available: " + known);
  }
  Runner run(opt);
  std::vector<CriterionResult> out;
  for (Suite s : chosen) {
    auto start = Clock::now();
    CriterionResult r;
    try {
      r = s(run);
    } catch (const std::exception& e) {
      r.checks.push_back({"completed without error", false, e.what()});
    }
    r.seconds = Seconds(start);
    if (opt.progress != nullptr) *opt.progress << FormatResult(r) << std::flush;
    out.push_back(std::move(r));
  }
  return out;
}

std::string FormatResult(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d %-16s %s (%.1f s)\n", r.pass() ? "PASS" : "FAIL",
                r.id, r.suite.c_str(), r.title.c_str(), r.seconds);
  std::string out = head;
  for (const Check& c : r.checks) {
    out += std::string("       ") + (c.pass ? "ok   " : "FAIL ") + c.name + ": " + c.detail + "\n";
  }
  return out;
}

std::string ResultsJson(const std::vector<CriterionResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CriterionResult& r : results) {
    nlohmann::json checks = nlohmann::json::array();
    for (const Check& c : r.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    arr.push_back({{"criterion", r.id},
                   {"suite", r.suite},
                   {"title", r.title},
                   {"pass", r.pass()},
                   {"seconds", r.seconds},
                   {"checks", checks}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace ocf::tools
