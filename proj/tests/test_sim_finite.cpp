#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <sstream>

#include "ocf/access_graph.hpp"
#include "ocf/partitioning.hpp"
#include "ocf/policies.hpp"
#include "ocf/policy_spec.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/sim_finite.hpp"

namespace ocf {
namespace {

// Returns a fixed list for every user; used to exercise the harness checks.
class FixedListPolicy final : public FinitePolicy {
 public:
  explicit FixedListPolicy(std::vector<ItemId> items) : items_(std::move(items)) {}
  Recommendation Recommend(FiniteContext&, UserId, Rng&) override {
    Recommendation rec;
    for (ItemId i : items_) rec.add(i, SlotKind::kExplore);
    return rec;
  }
  std::string name() const override { return "fixed"; }

 private:
  std::vector<ItemId> items_;
};

ModelGenerator PlantedGenerator(std::size_t n_items, std::size_t k) {
  return [n_items, k](Rng& rng) { return PlantedUniform(n_items, k, rng); };
}

FinitePolicyMaker Maker(const std::string& spec, const AccessGraph& g) {
  return MakeFinitePolicyMaker(PolicySpec::Parse(spec), g);
}

TEST(OptimalReward, TopRSum) {
  AccessGraph g = CompleteBipartite(1, 3);
  RewardModel m = RewardModel::Universal({3.0, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(OptimalReward(g, m, 0, 1), 3.0);
  EXPECT_DOUBLE_EQ(OptimalReward(g, m, 0, 2), 5.0);
  EXPECT_DOUBLE_EQ(OptimalReward(g, m, 0, 10), 6.0);
}

TEST(ArrivalOrder, IsSeededPermutation) {
  for (std::size_t trial = 0; trial < 20; ++trial) {
    std::vector<UserId> order = ArrivalOrder(50, 3, trial);
    std::vector<UserId> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<UserId> identity(50);
    std::iota(identity.begin(), identity.end(), UserId{0});
    EXPECT_EQ(sorted, identity);
    EXPECT_EQ(order, ArrivalOrder(50, 3, trial));
  }
  EXPECT_NE(ArrivalOrder(50, 3, 0), ArrivalOrder(50, 3, 1));
  EXPECT_NE(ArrivalOrder(50, 3, 0), ArrivalOrder(50, 4, 0));
}

TEST(RunFiniteTrial, SingleUserSingleItem) {
  AccessGraph g = CompleteBipartite(1, 1);
  RewardModel m = RewardModel::Universal({0.7});
  FiniteOptions opt;
  for (const char* spec : {"bpexp", "idexp", "uniform_explore", "degree_power(-1)",
                           "exploit_when_possible(uniform_explore)"}) {
    auto policy = Maker(spec, g)();
    FiniteTrial t = RunFiniteTrial(g, m, *policy, opt, 1, 0);
    EXPECT_DOUBLE_EQ(t.reward[0], 0.7) << spec;
    EXPECT_DOUBLE_EQ(t.optimal[0], 0.7);
  }
}

TEST(RunFiniteTrial, WarmStartLetsFirstUserExploit) {
  AccessGraph g = CompleteBipartite(3, 5);
  FiniteOptions opt;
  opt.warm_start = {4};
  auto policy = Maker("exploit_when_possible(uniform_explore)", g)();
  for (std::size_t trial = 0; trial < 20; ++trial) {
    FiniteTrial t = RunFiniteTrial(g, RewardModel::Planted(5, {4}), *policy, opt, 2, trial);
    for (UserId u = 0; u < 3; ++u) EXPECT_EQ(t.reward[u], 1.0);
  }
}

TEST(RunFiniteTrial, KeepsRecommendationsAndPermutation) {
  AccessGraph g = HatGraph(4);
  FiniteOptions opt;
  opt.r = 2;
  opt.keep_recommendations = true;
  auto policy = Maker("idexp", g)();
  FiniteTrial t = RunFiniteTrial(g, RewardModel::Planted(8, {0, 5}), *policy, opt, 3, 7);
  EXPECT_EQ(t.permutation, ArrivalOrder(4, 3, 7));
  ASSERT_EQ(t.shown.size(), 4u);
  for (UserId u = 0; u < 4; ++u) {
    EXPECT_LE(t.shown[u].size(), 2u);
    for (ItemId i : t.shown[u].items) EXPECT_TRUE(g.has_edge(u, i));
  }
}

TEST(RunFiniteTrial, RejectsMalformedRecommendations) {
  AccessGraph g = HatGraph(2);
  RewardModel m = RewardModel::Planted(4, {0});
  FiniteOptions opt;
  opt.r = 2;
  FixedListPolicy too_many({0, 2, 3});
  EXPECT_THROW(RunFiniteTrial(g, m, too_many, opt, 1, 0), std::logic_error);
  FixedListPolicy twice({2, 2});
  EXPECT_THROW(RunFiniteTrial(g, m, twice, opt, 1, 0), std::logic_error);
  FixedListPolicy foreign({0, 1});  // item 1 is private to user 1
  EXPECT_THROW(RunFiniteTrial(g, m, foreign, opt, 1, 0), GraphError);
}

// Rewards never exceed the optimum and ratios stay in [0, 1].
TEST(RunFiniteTrialProperty, RewardAtMostOptimal) {
  Rng rng(5);
  for (int k = 0; k < 40; ++k) {
    AccessGraph g = RandomBipartite(1 + UniformIndex(rng, 8), 1 + UniformIndex(rng, 16), 0.3, rng);
    FiniteOptions opt;
    opt.r = 1 + UniformIndex(rng, 3);
    opt.views_needed = 1 + static_cast<std::uint32_t>(UniformIndex(rng, 2));
    opt.delta = 0.2 * Uniform01(rng);
    std::vector<double> values(g.num_items());
    for (double& v : values) v = Uniform01(rng);
    RewardModel m = RewardModel::Universal(values);
    for (const char* spec : {"bpexp", "idexp", "degree_power(-0.5)", "uniform_explore",
                             "exploit_above_threshold(0.3, idexp)"}) {
      auto policy = Maker(spec, g)();
      FiniteTrial t = RunFiniteTrial(g, m, *policy, opt, 9, static_cast<std::size_t>(k));
      for (UserId u = 0; u < g.num_users(); ++u) {
        EXPECT_GE(t.reward[u], 0.0);
        EXPECT_LE(t.reward[u], t.optimal[u] + 1e-12) << spec;
      }
    }
  }
}

TEST(EstimateGammaFinite, GenieIsExactlyOne) {
  Rng rng(6);
  AccessGraph g = RandomBipartite(10, 20, 0.3, rng);
  FiniteEstimateRequest req;
  req.graph = &g;
  req.model = PlantedGenerator(20, 3);
  req.policy = Maker("genie", g);
  req.options.r = 2;
  req.trials = 300;
  req.seed = 4;
  req.jobs = 1;
  RatioEstimate est = EstimateGammaFinite(req);
  EXPECT_EQ(est.gamma, 1.0);
  EXPECT_EQ(est.pooled_mean, 1.0);
  for (const UserRatio& u : est.per_user) EXPECT_EQ(u.mean, 1.0);
  EXPECT_EQ(est.trials, 300u);
}

TEST(EstimateGammaFinite, UsersWithZeroOptimumAreExcluded) {
  // User 1 only sees item 1, which is never planted.
  std::vector<Edge> edges = {{0, 0}, {1, 1}};
  AccessGraph g = AccessGraph::FromEdges(edges, 2, 2);
  FiniteEstimateRequest req;
  req.graph = &g;
  req.model = FixedModel(RewardModel::Planted(2, {0}));
  req.policy = Maker("uniform_explore", g);
  req.trials = 50;
  req.jobs = 1;
  RatioEstimate est = EstimateGammaFinite(req);
  EXPECT_EQ(est.excluded_users, 1u);
  ASSERT_EQ(est.per_user.size(), 1u);
  EXPECT_EQ(est.per_user[0].user, 0u);
  EXPECT_EQ(est.gamma, 1.0);
}

TEST(EstimateGammaFinite, DeterministicAcrossJobCounts) {
  AccessGraph g = HatGraph(6);
  std::string csv[2];
  double gamma[2];
  double hw[2];
  const std::size_t jobs[2] = {1, 3};
  for (int k = 0; k < 2; ++k) {
    std::ostringstream out;
    FiniteEstimateRequest req;
    req.graph = &g;
    req.model = PlantedGenerator(12, 2);
    req.policy = Maker("idexp", g);
    req.options.r = 2;
    req.trials = 700;  // spans several blocks
    req.seed = 99;
    req.jobs = jobs[k];
    req.trial_csv = &out;
    req.policy_label = "idexp";
    RatioEstimate est = EstimateGammaFinite(req);
    csv[k] = out.str();
    gamma[k] = est.gamma;
    hw[k] = est.half_width;
  }
  EXPECT_EQ(csv[0], csv[1]);
  EXPECT_EQ(gamma[0], gamma[1]);
  EXPECT_EQ(hw[0], hw[1]);
}

TEST(EstimateGammaFinite, TrialCsvRows) {
  AccessGraph g = CompleteBipartite(2, 2);
  std::ostringstream out;
  FiniteEstimateRequest req;
  req.graph = &g;
  req.model = FixedModel(RewardModel::Planted(2, {1}));
  req.policy = Maker("degree_power(-0.5)", g);
  req.trials = 3;
  req.seed = 5;
  req.jobs = 1;
  req.trial_csv = &out;
  req.policy_label = "degree_power(-0.5)";
  EstimateGammaFinite(req);
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_NE(line.find(",\"degree_power(-0.5)\",1,5"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 6u);
  EXPECT_EQ(std::string(kFiniteTrialCsvHeader), "trial,user,reward,optimal,policy,r,seed");
}

// Two policies run with one seed face identical models: the genie's
// per-trial optimum equals the optimum seen by any other policy.
TEST(EstimateGammaFinite, SeedsCoupleModelsAcrossPolicies) {
  AccessGraph g = CompleteBipartite(3, 6);
  std::string opt_cols[2];
  const char* specs[2] = {"genie", "bpexp"};
  for (int k = 0; k < 2; ++k) {
    std::ostringstream out;
    FiniteEstimateRequest req;
    req.graph = &g;
    req.model = PlantedGenerator(6, 1);
    req.policy = Maker(specs[k], g);
    req.trials = 40;
    req.seed = 8;
    req.jobs = 1;
    req.trial_csv = &out;
    EstimateGammaFinite(req);
    std::istringstream in(out.str());
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cols;
      std::stringstream ls(line);
      std::string c;
      while (std::getline(ls, c, ',')) cols.push_back(c);
      opt_cols[k] += cols.at(3) + ";";
    }
  }
  EXPECT_EQ(opt_cols[0], opt_cols[1]);
}

}  // namespace
}  // namespace ocf
