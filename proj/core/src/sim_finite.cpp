#include "ocf/sim_finite.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ocf/csv.hpp"
#include "ocf/parallel.hpp"

namespace ocf {

double OptimalReward(const AccessGraph& g, const RewardModel& model, UserId u, std::size_t r) {
  const std::size_t base = g.user_edge_begin(u);
  auto items = g.items_of(u);
  double total = 0.0;
  for (ItemId i : TrueTopItems(g, model, u, r)) {
    std::size_t k = static_cast<std::size_t>(
        std::lower_bound(items.begin(), items.end(), i) - items.begin());
    total += model.EdgeValue(i, base + k);
  }
  return total;
}

std::vector<UserId> ArrivalOrder(std::size_t n_users, std::uint64_t seed, std::size_t trial) {
  std::vector<UserId> order(n_users);
  std::iota(order.begin(), order.end(), UserId{0});
  Rng rng = MakeRng(seed, trial, Stream::kArrivals);
  PartialShuffle(std::span<UserId>(order), n_users, rng);
  return order;
}

FiniteTrial RunFiniteTrial(const AccessGraph& g, const RewardModel& model, FinitePolicy& policy,
                           const FiniteOptions& opt, std::uint64_t seed, std::size_t trial) {
  FiniteTrial t;
  t.trial = trial;
  t.seed = seed;
  t.permutation = ArrivalOrder(g.num_users(), seed, trial);
  t.reward.assign(g.num_users(), 0.0);
  t.optimal.assign(g.num_users(), 0.0);
  if (opt.keep_recommendations) t.shown.resize(g.num_users());

  ValueOracle oracle(opt.views_needed, opt.delta, DeriveSeed(seed, trial, Stream::kOracle));
  FiniteContext ctx(g, model, oracle, opt.r, opt.p_pred);
  for (ItemId i : opt.warm_start) ctx.MarkExplored(i);
  Rng rng = MakeRng(seed, trial, Stream::kPolicy);

  for (UserId u : t.permutation) {
    Recommendation rec = policy.Recommend(ctx, u, rng);
    if (rec.size() > opt.r || rec.kinds.size() != rec.items.size()) {
      throw std::logic_error(policy.name() + " returned a malformed recommendation");
    }
    for (std::size_t k = 1; k < rec.items.size(); ++k) {
      if (std::find(rec.items.begin(), rec.items.begin() + static_cast<std::ptrdiff_t>(k),
                    rec.items[k]) != rec.items.begin() + static_cast<std::ptrdiff_t>(k)) {
        throw std::logic_error(policy.name() + " recommended an item twice");
      }
    }
    const std::size_t base = g.user_edge_begin(u);
    auto items = g.items_of(u);
    double earned = 0.0;
    for (ItemId i : rec.items) {
      auto pos = std::lower_bound(items.begin(), items.end(), i);
      if (pos == items.end() || *pos != i) {
        throw GraphError(policy.name() + " recommended item " + std::to_string(i) +
                         " outside the neighborhood of user " + std::to_string(u));
      }
      earned += model.EdgeValue(i, base + static_cast<std::size_t>(pos - items.begin()));
    }
    t.reward[u] = earned;
    t.optimal[u] = OptimalReward(g, model, u, opt.r);
    ctx.RecordPresentation(rec);
    if (opt.keep_recommendations) t.shown[u] = std::move(rec);
  }
  return t;
}

ModelGenerator FixedModel(RewardModel model) {
  auto shared = std::make_shared<const RewardModel>(std::move(model));
  return [shared](Rng&) { return *shared; };
}

RatioEstimate EstimateGammaFinite(const FiniteEstimateRequest& req) {
  const AccessGraph& g = *req.graph;
  const std::size_t n_users = g.num_users();
  const std::size_t n_blocks = (req.trials + kTrialBlock - 1) / kTrialBlock;

  struct Block {
    std::vector<MeanAccumulator> per_user;
    MeanAccumulator pooled;
    std::string csv;
  };
  std::vector<Block> blocks(n_blocks);

  ForEachBlock(req.trials, req.jobs, [&](std::size_t b, std::size_t first, std::size_t end) {
    Block& out = blocks[b];
    out.per_user.resize(n_users);
    std::ostringstream csv;
    std::unique_ptr<FinitePolicy> policy = req.policy();
    for (std::size_t trial = first; trial < end; ++trial) {
      Rng model_rng = MakeRng(req.seed, trial, Stream::kRewardModel);
      RewardModel model = req.model(model_rng);
      FiniteTrial t = RunFiniteTrial(g, model, *policy, req.options, req.seed, trial);
      for (UserId u = 0; u < n_users; ++u) {
        if (t.optimal[u] > 0.0) {
          double ratio = t.reward[u] / t.optimal[u];
          out.per_user[u].Add(ratio);
          out.pooled.Add(ratio);
        }
        if (req.trial_csv != nullptr) {
          csv << trial << ',' << u << ',' << FormatNumber(t.reward[u]) << ','
              << FormatNumber(t.optimal[u]) << ",\"" << req.policy_label << "\"," << req.options.r
              << ',' << req.seed << '\n';
        }
      }
    }
    out.csv = csv.str();
  });

  std::vector<MeanAccumulator> per_user(n_users);
  MeanAccumulator pooled;
  for (Block& b : blocks) {
    for (UserId u = 0; u < n_users; ++u) per_user[u].Merge(b.per_user[u]);
    pooled.Merge(b.pooled);
    if (req.trial_csv != nullptr) *req.trial_csv << b.csv;
  }
  std::vector<UserRatio> users;
  users.reserve(n_users);
  for (UserId u = 0; u < n_users; ++u) {
    users.push_back({u, per_user[u].count(), per_user[u].mean(), per_user[u].half_width()});
  }
  return SummarizeUsers(std::move(users), req.trials, pooled);
}

}  // namespace ocf
