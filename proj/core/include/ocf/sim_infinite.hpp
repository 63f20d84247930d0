#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ocf/access_graph.hpp"
#include "ocf/infinite_policies.hpp"
#include "ocf/metrics.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/rng.hpp"

namespace ocf {

/// Users x item-classes setting. A rate list of length 1 applies to every
/// node on that side.
struct InfiniteConfig {
  std::vector<double> user_rates{1.0};
  std::vector<double> class_rates{1.0};
  double tau = 1.0;
  double horizon = 1000.0;
  std::optional<double> warmup;  // defaults to 5 * tau
  std::size_t r = 1;
  std::uint32_t views_needed = 1;  // f
  double delta = 0.0;

  double warmup_time() const { return warmup.value_or(5.0 * tau); }
  double user_rate(UserId u) const {
    return user_rates.size() == 1 ? user_rates[0] : user_rates[u];
  }
  double class_rate(ClassId c) const {
    return class_rates.size() == 1 ? class_rates[0] : class_rates[c];
  }

  /// Throws std::invalid_argument on a malformed configuration.
  void Validate(const AccessGraph& g) const;
};

struct Event {
  enum class Kind : std::uint8_t { kVisit, kArrival };
  Kind kind = Kind::kVisit;
  std::uint32_t node = 0;  // user for a visit, class for an arrival
  double time = std::numeric_limits<double>::infinity();
};

/// Superposition of all visit and arrival processes.
class EventSampler {
 public:
  EventSampler(const InfiniteConfig& cfg, std::size_t n_users, std::size_t n_classes);

  double total_rate() const { return total_; }
  /// Exponential gap with the total rate, mark proportional to its rate.
  /// Infinite time when every rate is zero.
  Event Next(double now, Rng& rng) const;

 private:
  std::size_t n_users_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

struct VisitRecord {
  std::uint64_t s = 0;  // visit index, counting warm-up visits
  UserId user = 0;
  double time = 0.0;
  std::size_t latest_size = 0;
  double reward = 0.0;
  double optimal = 0.0;
  std::vector<LiveItemId> shown;  // empty unless requested

  std::optional<double> ratio() const {
    if (optimal > 0.0) return reward / optimal;
    return std::nullopt;
  }
};

/// Fate of every item that arrived during one run.
struct LatestSetBookkeeping {
  std::uint64_t arrivals = 0;
  std::uint64_t consumed = 0;        // member of some visit's latest set
  std::uint64_t expired_unseen = 0;  // expired before any neighbor visited
  std::uint64_t pending_at_end = 0;  // alive and unseen at the horizon
};

struct InfiniteRun {
  std::vector<VisitRecord> visits;  // post-warm-up only
  LatestSetBookkeeping bookkeeping;
  // Post-warm-up: per class, the number of that class's items in the latest
  // set of each visit by one of its neighbors.
  std::vector<MeanAccumulator> latest_per_class;
};

/// Event-driven run to the horizon with lazy expiry. The k-th arrival of
/// class c is worth V_c(k).
InfiniteRun RunInfinite(const AccessGraph& g, const InfiniteConfig& cfg,
                        const RewardModel& model, VisitPolicy& policy, std::uint64_t seed,
                        std::size_t trial, bool keep_shown = false);

using VisitPolicyMaker = std::function<std::unique_ptr<VisitPolicy>()>;

struct InfiniteEstimateRequest {
  const AccessGraph* graph = nullptr;
  InfiniteConfig config;
  const RewardModel* model = nullptr;
  VisitPolicyMaker policy;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  // Per-visit rows (trial,s,user,t,L_size,reward,optimal,ratio) in trial
  // order, without a header. ratio is empty when the optimum is 0.
  std::ostream* visit_csv = nullptr;
  // Receives every defined per-visit ratio in trial order.
  std::vector<double>* ratios_out = nullptr;
};

struct InfiniteEstimate {
  /// Per user: pooled mean of per-visit ratios; half-width from per-trial
  /// batch means.
  RatioEstimate ratio;
  MeanAccumulator latest_size;  // |L(s)| over post-warm-up visits
  // Pooled ratios in the first and second half of the measured window.
  MeanAccumulator first_half;
  MeanAccumulator second_half;
  std::vector<MeanAccumulator> latest_per_class;
  LatestSetBookkeeping bookkeeping;  // summed over trials
};

InfiniteEstimate EstimateGammaInfinite(const InfiniteEstimateRequest& req);

inline constexpr const char* kVisitCsvHeader = "trial,s,user,t,L_size,reward,optimal,ratio";

}  // namespace ocf
