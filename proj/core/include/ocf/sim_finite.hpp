#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ocf/access_graph.hpp"
#include "ocf/metrics.hpp"
#include "ocf/policies.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/rng.hpp"

namespace ocf {

/// Sum of the top-min(r, d_u) true values among u's neighbors.
double OptimalReward(const AccessGraph& g, const RewardModel& model, UserId u, std::size_t r);

struct FiniteOptions {
  std::size_t r = 1;
  std::uint32_t views_needed = 1;  // f
  double delta = 0.0;
  double p_pred = 1.0;
  // Items explored before the first arrival.
  std::vector<ItemId> warm_start;
  bool keep_recommendations = false;
};

struct FiniteTrial {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<UserId> permutation;  // arrival order
  // Indexed by user.
  std::vector<double> reward;
  std::vector<double> optimal;
  std::vector<Recommendation> shown;  // empty unless keep_recommendations
};

/// Uniformly random arrival order for the given trial.
std::vector<UserId> ArrivalOrder(std::size_t n_users, std::uint64_t seed, std::size_t trial);

/// One pass of every user through the system. Rewards use true values;
/// identified values only steer the policy's choices. Throws std::logic_error
/// for more than r items or a repeated item, GraphError for an item outside
/// the user's neighborhood.
FiniteTrial RunFiniteTrial(const AccessGraph& g, const RewardModel& model, FinitePolicy& policy,
                           const FiniteOptions& opt, std::uint64_t seed, std::size_t trial);

using ModelGenerator = std::function<RewardModel(Rng&)>;
using FinitePolicyMaker = std::function<std::unique_ptr<FinitePolicy>()>;

/// Fixed model shared by every trial.
ModelGenerator FixedModel(RewardModel model);

struct FiniteEstimateRequest {
  const AccessGraph* graph = nullptr;
  ModelGenerator model;
  FinitePolicyMaker policy;
  FiniteOptions options;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;  // 0 = all cores
  // When set, receives per-trial rows (trial,user,reward,optimal,policy,r,seed)
  // in trial order, without a header.
  std::ostream* trial_csv = nullptr;
  std::string policy_label;
};

/// Per-user mean of R(u)/R*(u) over trials with R*(u) > 0, minimized over
/// users. The model is redrawn per trial from the reward-model stream, so
/// two policies run with one seed face the same models and arrival orders.
RatioEstimate EstimateGammaFinite(const FiniteEstimateRequest& req);

inline constexpr const char* kFiniteTrialCsvHeader = "trial,user,reward,optimal,policy,r,seed";

}  // namespace ocf
