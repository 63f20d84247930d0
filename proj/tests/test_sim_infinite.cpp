#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "ocf/access_graph.hpp"
#include "ocf/infinite_policies.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/sim_infinite.hpp"

namespace ocf {
namespace {

RewardModel Constant(std::size_t n_classes, double v = 1.0) {
  return RewardModel::Sequences(std::vector<ValueSequence>(n_classes, ValueSequence::Constant(v)));
}

VisitPolicyMaker Make(std::function<std::unique_ptr<VisitPolicy>()> f) { return f; }

class RepeatFirstPolicy final : public VisitPolicy {
 public:
  VisitRecommendation Recommend(const VisitSnapshot& v, Rng&) override {
    VisitRecommendation rec;
    if (!v.items.empty()) {
      rec.add(v.items[0].id, SlotKind::kExplore);
      rec.add(v.items[0].id, SlotKind::kExplore);
    }
    return rec;
  }
  std::string name() const override { return "repeat"; }
};

class UnknownItemPolicy final : public VisitPolicy {
 public:
  VisitRecommendation Recommend(const VisitSnapshot&, Rng&) override {
    VisitRecommendation rec;
    rec.add(1u << 30, SlotKind::kExplore);
    return rec;
  }
  std::string name() const override { return "unknown"; }
};

TEST(InfiniteConfig, ValidateRejectsMalformedSettings) {
  AccessGraph g = CompleteBipartite(2, 3);
  InfiniteConfig ok;
  EXPECT_NO_THROW(ok.Validate(g));
  auto bad = [&](auto mutate) {
    InfiniteConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(g), std::invalid_argument);
  };
  bad([](InfiniteConfig& c) { c.user_rates = {1.0, 1.0, 1.0}; });
  bad([](InfiniteConfig& c) { c.class_rates = {1.0, -1.0, 1.0}; });
  bad([](InfiniteConfig& c) { c.tau = 0.0; });
  bad([](InfiniteConfig& c) { c.horizon = -1.0; });
  bad([](InfiniteConfig& c) { c.warmup = 1000.0; });
  bad([](InfiniteConfig& c) { c.r = 0; });
  bad([](InfiniteConfig& c) { c.views_needed = 0; });
  bad([](InfiniteConfig& c) { c.delta = 0.5; });
  InfiniteConfig per_node;
  per_node.user_rates = {1.0, 2.0};
  per_node.class_rates = {0.5, 0.5, 0.0};
  EXPECT_NO_THROW(per_node.Validate(g));
  EXPECT_DOUBLE_EQ(per_node.user_rate(1), 2.0);
  EXPECT_DOUBLE_EQ(InfiniteConfig{}.warmup_time(), 5.0);
}

TEST(EventSampler, MarksProportionalToRates) {
  InfiniteConfig cfg;
  cfg.user_rates = {2.0};
  cfg.class_rates = {1.0};
  EventSampler sampler(cfg, 1, 1);
  EXPECT_DOUBLE_EQ(sampler.total_rate(), 3.0);
  Rng rng(1);
  const int draws = 60000;
  int visits = 0;
  double gap_sum = 0.0;
  for (int d = 0; d < draws; ++d) {
    Event e = sampler.Next(0.0, rng);
    visits += e.kind == Event::Kind::kVisit;
    gap_sum += e.time;
  }
  double p = 2.0 / 3.0;
  EXPECT_NEAR(visits / static_cast<double>(draws), p, 4.0 * std::sqrt(p * (1 - p) / draws));
  // Exponential(3) gaps: mean 1/3, sd 1/3.
  EXPECT_NEAR(gap_sum / draws, 1.0 / 3.0, 4.0 * (1.0 / 3.0) / std::sqrt(draws));
}

TEST(EventSampler, PoissonCountOverWindow) {
  InfiniteConfig cfg;
  cfg.user_rates = {0.5};
  cfg.class_rates = {0.5};
  EventSampler sampler(cfg, 2, 2);
  Rng rng(2);
  const double window = 20000.0;
  double now = 0.0;
  std::size_t events = 0;
  for (;;) {
    Event e = sampler.Next(now, rng);
    if (e.time >= window) break;
    now = e.time;
    ++events;
  }
  const double mean = 2.0 * window;
  EXPECT_NEAR(static_cast<double>(events), mean, 4.0 * std::sqrt(mean));
}

TEST(EventSampler, AllZeroRatesNeverFire) {
  InfiniteConfig cfg;
  cfg.user_rates = {0.0};
  cfg.class_rates = {0.0};
  EventSampler sampler(cfg, 3, 3);
  Rng rng(3);
  EXPECT_TRUE(std::isinf(sampler.Next(0.0, rng).time));
}

TEST(RunInfinite, NoArrivalsMeansNoRatios) {
  AccessGraph g = CompleteBipartite(2, 2);
  InfiniteConfig cfg;
  cfg.class_rates = {0.0};
  cfg.horizon = 200.0;
  UlExpPolicy policy;
  InfiniteRun run = RunInfinite(g, cfg, Constant(2), policy, 1, 0);
  EXPECT_FALSE(run.visits.empty());
  for (const VisitRecord& v : run.visits) {
    EXPECT_FALSE(v.ratio().has_value());
    EXPECT_EQ(v.latest_size, 0u);
  }
  EXPECT_EQ(run.bookkeeping.arrivals, 0u);
}

// One user, one class, unit rates, lifetime 1: the latest set holds the
// arrivals since the previous visit that are younger than 1, so its mean
// size is E[min(Exp(1), 1)] = 1 - 1/e.
TEST(RunInfinite, LatestSetSizeSingleEdge) {
  AccessGraph g = CompleteBipartite(1, 1);
  InfiniteConfig cfg;
  cfg.horizon = 40000.0;
  UlExpPolicy policy;
  InfiniteRun run = RunInfinite(g, cfg, Constant(1), policy, 4, 0);
  MeanAccumulator size;
  for (const VisitRecord& v : run.visits) size.Add(static_cast<double>(v.latest_size));
  EXPECT_NEAR(size.mean(), 1.0 - std::exp(-1.0), size.half_width(4.0));
}

// Every arrival is consumed by exactly one latest set, expires unseen, or is
// still pending at the horizon.
TEST(RunInfiniteProperty, BookkeepingBalances) {
  Rng rng(5);
  for (int k = 0; k < 30; ++k) {
    AccessGraph g = RandomBipartite(1 + UniformIndex(rng, 6), 1 + UniformIndex(rng, 8), 0.4, rng);
    InfiniteConfig cfg;
    cfg.user_rates = {0.2 + 2.0 * Uniform01(rng)};
    cfg.class_rates = {0.2 + 2.0 * Uniform01(rng)};
    cfg.tau = 0.2 + 3.0 * Uniform01(rng);
    cfg.horizon = 150.0;
    cfg.r = 1 + UniformIndex(rng, 3);
    cfg.views_needed = 1 + static_cast<std::uint32_t>(UniformIndex(rng, 3));
    UlExpFPolicy policy;
    InfiniteRun run = RunInfinite(g, cfg, Constant(g.num_items()), policy, 6,
                                  static_cast<std::size_t>(k));
    const auto& b = run.bookkeeping;
    EXPECT_EQ(b.arrivals, b.consumed + b.expired_unseen + b.pending_at_end);
    for (const VisitRecord& v : run.visits) {
      EXPECT_LE(v.reward, v.optimal + 1e-12);
      EXPECT_GE(v.time, cfg.warmup_time());
    }
  }
}

TEST(RunInfinite, RejectsMalformedRecommendations) {
  AccessGraph g = CompleteBipartite(1, 1);
  InfiniteConfig cfg;
  cfg.r = 2;
  cfg.horizon = 50.0;
  RepeatFirstPolicy repeat;
  EXPECT_THROW(RunInfinite(g, cfg, Constant(1), repeat, 1, 0), std::logic_error);
  UnknownItemPolicy unknown;
  EXPECT_THROW(RunInfinite(g, cfg, Constant(1), unknown, 1, 0), std::logic_error);
}

TEST(RunInfinite, GenieRatioIsOne) {
  AccessGraph g = Biregular(4, 8, 4);
  InfiniteConfig cfg;
  cfg.horizon = 300.0;
  cfg.r = 2;
  RewardModel m = RewardModel::Sequences(
      std::vector<ValueSequence>(8, ValueSequence::Geometric(1.0, 0.9)));
  VisitGeniePolicy genie;
  InfiniteRun run = RunInfinite(g, cfg, m, genie, 2, 0);
  std::size_t defined = 0;
  for (const VisitRecord& v : run.visits) {
    if (auto ratio = v.ratio()) {
      EXPECT_DOUBLE_EQ(*ratio, 1.0);
      ++defined;
    }
  }
  EXPECT_GT(defined, 100u);
}

TEST(RunInfinite, DeterministicForSeedAndTrial) {
  AccessGraph g = HatGraph(3);
  InfiniteConfig cfg;
  cfg.horizon = 200.0;
  cfg.r = 2;
  UlExpPolicy a, b;
  InfiniteRun x = RunInfinite(g, cfg, Constant(6), a, 7, 3, true);
  InfiniteRun y = RunInfinite(g, cfg, Constant(6), b, 7, 3, true);
  ASSERT_EQ(x.visits.size(), y.visits.size());
  for (std::size_t k = 0; k < x.visits.size(); ++k) {
    EXPECT_EQ(x.visits[k].time, y.visits[k].time);
    EXPECT_EQ(x.visits[k].shown, y.visits[k].shown);
  }
  InfiniteRun z = RunInfinite(g, cfg, Constant(6), a, 7, 4, true);
  ASSERT_FALSE(z.visits.empty());
  EXPECT_NE(x.visits[0].time, z.visits[0].time);
}

InfiniteEstimateRequest UlExpRequest(const AccessGraph& g, const RewardModel& m) {
  InfiniteEstimateRequest req;
  req.graph = &g;
  req.model = &m;
  req.config.horizon = 400.0;
  req.config.tau = 2.0;
  req.policy = Make([] { return std::make_unique<UlExpPolicy>(); });
  req.trials = 20;
  req.seed = 11;
  req.jobs = 1;
  return req;
}

// With unit rates, a class's expected contribution to one neighbor visit's
// latest set is at most its rate over the total visit rate of its
// neighbors, here 1/2; summed over a user's classes this is Z(u).
TEST(EstimateGammaInfinite, LatestSetIsBoundedByInverseDegreeMass) {
  AccessGraph g = Biregular(8, 16, 4);
  RewardModel m = Constant(16);
  InfiniteEstimateRequest req = UlExpRequest(g, m);
  InfiniteEstimate est = EstimateGammaInfinite(req);
  for (const MeanAccumulator& c : est.latest_per_class) {
    EXPECT_LE(c.mean(), 0.5 + c.half_width(3.0 / 1.96) + 1e-12);
  }
  EXPECT_LE(est.latest_size.mean(), ComputeStats(g).z_max + est.latest_size.half_width(3.0 / 1.96));
  EXPECT_NEAR(est.first_half.mean(), est.second_half.mean(),
              est.first_half.half_width() + est.second_half.half_width());
}

TEST(EstimateGammaInfinite, DeterministicAcrossJobCounts) {
  AccessGraph g = HatGraph(4);
  RewardModel m = RewardModel::Sequences(
      std::vector<ValueSequence>(8, ValueSequence::PlantedPosition(3, 1.0, 0.1)));
  std::string csv[2];
  std::vector<double> ratios[2];
  double gamma[2];
  const std::size_t jobs[2] = {1, 3};
  for (int k = 0; k < 2; ++k) {
    std::ostringstream out;
    InfiniteEstimateRequest req = UlExpRequest(g, m);
    req.config.horizon = 60.0;
    req.trials = 600;
    req.jobs = jobs[k];
    req.visit_csv = &out;
    req.ratios_out = &ratios[k];
    gamma[k] = EstimateGammaInfinite(req).ratio.gamma;
    csv[k] = out.str();
  }
  EXPECT_EQ(csv[0], csv[1]);
  EXPECT_EQ(ratios[0], ratios[1]);
  EXPECT_EQ(gamma[0], gamma[1]);
  EXPECT_FALSE(ratios[0].empty());
  EXPECT_EQ(std::string(kVisitCsvHeader), "trial,s,user,t,L_size,reward,optimal,ratio");
}

TEST(EstimateGammaInfinite, GenieEstimateIsOne) {
  AccessGraph g = CompleteBipartite(3, 4);
  RewardModel m = RewardModel::Sequences(
      std::vector<ValueSequence>(4, ValueSequence::Geometric(0.5, 0.5)));
  InfiniteEstimateRequest req = UlExpRequest(g, m);
  req.config.horizon = 100.0;
  req.policy = Make([] { return std::make_unique<VisitGeniePolicy>(); });
  InfiniteEstimate est = EstimateGammaInfinite(req);
  EXPECT_DOUBLE_EQ(est.ratio.gamma, 1.0);
}

}  // namespace
}  // namespace ocf
