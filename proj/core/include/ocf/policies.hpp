#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocf/access_graph.hpp"
#include "ocf/partitioning.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/rng.hpp"

namespace ocf {

enum class SlotKind : std::uint8_t { kExplore, kExploit };

/// Ordered, duplicate-free list of shown items with a tag per slot.
template <class Id>
struct BasicRecommendation {
  std::vector<Id> items;
  std::vector<SlotKind> kinds;

  std::size_t size() const { return items.size(); }
  bool contains(Id id) const {
    return std::find(items.begin(), items.end(), id) != items.end();
  }
  void add(Id id, SlotKind kind) {
    items.push_back(id);
    kinds.push_back(kind);
  }
  std::size_t count(SlotKind kind) const {
    return static_cast<std::size_t>(std::count(kinds.begin(), kinds.end(), kind));
  }
};

using Recommendation = BasicRecommendation<ItemId>;

struct SlotSplit {
  std::size_t explore = 0;
  std::size_t exploit = 0;
};

/// explore ~ Binomial(r, explore_prob), exploit = r - explore.
SlotSplit SplitSlots(std::size_t r, double explore_prob, Rng& rng);

/// Explore probability used by every randomized split: f / (f + 1), i.e. 1/2
/// when a single view identifies an item.
inline double ExploreProbability(std::uint32_t views_needed) {
  return static_cast<double>(views_needed) / static_cast<double>(views_needed + 1);
}

/// Mutable per-trial state of the finite-population setting: view counts and
/// value identification. One context per trial.
class FiniteContext {
 public:
  FiniteContext(const AccessGraph& g, const RewardModel& model, ValueOracle& oracle,
                std::size_t r, double p_pred = 1.0);

  const AccessGraph& graph() const { return *graph_; }
  const RewardModel& model() const { return *model_; }
  std::size_t r() const { return r_; }
  double p_pred() const { return p_pred_; }
  std::uint32_t views_needed() const { return oracle_->views_needed(); }

  std::uint32_t views(ItemId i) const { return views_[i]; }
  bool explored(ItemId i) const { return views_[i] >= oracle_->views_needed(); }

  /// Identified value of (u, i) or nullopt if i is not yet explored. `edge`
  /// is the global edge index of (u, i).
  std::optional<double> Reported(UserId u, ItemId i, std::size_t edge);

  /// Pre-explored items, e.g. a warm-start set.
  void MarkExplored(ItemId i);
  void RecordPresentation(const Recommendation& rec);

 private:
  const AccessGraph* graph_;
  const RewardModel* model_;
  ValueOracle* oracle_;
  std::size_t r_;
  double p_pred_;
  std::vector<std::uint32_t> views_;
};

/// Source of exploration candidates for one arrival.
class Explorer {
 public:
  virtual ~Explorer() = default;
  /// Up to `max_count` distinct candidates in draw order; any prefix of the
  /// result is itself a valid draw of that size.
  virtual std::vector<ItemId> Draw(FiniteContext& ctx, UserId u, std::size_t max_count,
                                   Rng& rng) = 0;
  virtual std::string name() const = 0;
};

/// Uniform without replacement among the unexplored items of M(u).
class PartitionExplorer final : public Explorer {
 public:
  explicit PartitionExplorer(std::shared_ptr<const SemiMatching> matching);
  std::vector<ItemId> Draw(FiniteContext& ctx, UserId u, std::size_t max_count,
                           Rng& rng) override;
  std::string name() const override { return "partition"; }

 private:
  std::shared_ptr<const SemiMatching> matching_;
  std::vector<std::vector<ItemId>> owned_;
};

/// Sets of the user's greedy neighborhood partition drawn uniformly without
/// replacement; from each set one item with probability proportional to 1/d_i
/// over all of the set's items, explored or not. Partitions are computed on a
/// user's first arrival and cached.
class InverseDegreeSetExplorer final : public Explorer {
 public:
  std::vector<ItemId> Draw(FiniteContext& ctx, UserId u, std::size_t max_count,
                           Rng& rng) override;
  std::string name() const override { return "inverse_degree_sets"; }

  const NeighborhoodPartition& PartitionFor(const AccessGraph& g, UserId u, std::size_t r);

 private:
  std::vector<std::optional<NeighborhoodPartition>> cache_;
};

/// Unexplored neighbors sampled without replacement with weight d_i^exponent.
class DegreePowerExplorer final : public Explorer {
 public:
  explicit DegreePowerExplorer(double exponent) : exponent_(exponent) {}
  std::vector<ItemId> Draw(FiniteContext& ctx, UserId u, std::size_t max_count,
                           Rng& rng) override;
  std::string name() const override;
  double exponent() const { return exponent_; }

 private:
  double exponent_;
};

/// Top `count` explored neighbors of u by identified value (ties: lower item
/// index), skipping `exclude`. With p_pred < 1 each slot independently takes
/// the runner-up instead of the best remaining item w.p. 1 - p_pred.
std::vector<ItemId> TopExplored(FiniteContext& ctx, UserId u, std::size_t count,
                                std::span<const ItemId> exclude, Rng& rng);

/// Fills the slots of `split`: explore picks first, then exploit picks. An
/// explore slot with no candidate becomes an exploit slot; an exploit slot
/// with no candidate becomes an explore slot; a slot with neither stays empty.
Recommendation AssembleRecommendation(FiniteContext& ctx, UserId u, SlotSplit split,
                                      Explorer& explorer, Rng& rng);

class FinitePolicy {
 public:
  virtual ~FinitePolicy() = default;
  virtual Recommendation Recommend(FiniteContext& ctx, UserId u, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

/// Randomized explore/exploit split with a pluggable explorer. BPExp, IDExp,
/// the degree-power family and uniform exploration are all instances.
class SplitPolicy final : public FinitePolicy {
 public:
  SplitPolicy(std::string name, std::unique_ptr<Explorer> explorer);
  Recommendation Recommend(FiniteContext& ctx, UserId u, Rng& rng) override;
  std::string name() const override { return name_; }
  Explorer& explorer() { return *explorer_; }

 private:
  std::string name_;
  std::unique_ptr<Explorer> explorer_;
};

/// Exploits every slot when the best identified neighbor value exceeds
/// `threshold`, else explores every slot. threshold = 0 gives
/// exploit-when-possible.
class ThresholdExploitPolicy final : public FinitePolicy {
 public:
  ThresholdExploitPolicy(std::string name, double threshold,
                         std::unique_ptr<Explorer> explorer);
  Recommendation Recommend(FiniteContext& ctx, UserId u, Rng& rng) override;
  std::string name() const override { return name_; }

 private:
  std::string name_;
  double threshold_;
  std::unique_ptr<Explorer> explorer_;
};

/// Shows the true top-r items. Not an online policy; used to self-test the
/// harness (its ratio is exactly 1).
class GeniePolicy final : public FinitePolicy {
 public:
  Recommendation Recommend(FiniteContext& ctx, UserId u, Rng& rng) override;
  std::string name() const override { return "genie"; }
};

/// Top-min(r, d_u) items of u by true value (ties: lower index).
std::vector<ItemId> TrueTopItems(const AccessGraph& g, const RewardModel& model, UserId u,
                                 std::size_t r);

// One-call forms of the individual strategies.
Recommendation BpExpRecommend(FiniteContext& ctx, UserId u,
                              std::shared_ptr<const SemiMatching> matching, Rng& rng);
Recommendation IdExpRecommend(FiniteContext& ctx, UserId u,
                              InverseDegreeSetExplorer& partitions, Rng& rng);
Recommendation DegreePowerRecommend(FiniteContext& ctx, UserId u, double exponent,
                                    Rng& rng);
Recommendation ExploitWhenPossibleRecommend(FiniteContext& ctx, UserId u,
                                            Explorer& explorer, Rng& rng);
Recommendation ExploitAboveThresholdRecommend(FiniteContext& ctx, UserId u, double t,
                                              Explorer& explorer, Rng& rng);

}  // namespace ocf
