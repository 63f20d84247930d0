#include "ocf/policies.hpp"

#include <cmath>
#include <sstream>

namespace ocf {

SlotSplit SplitSlots(std::size_t r, double explore_prob, Rng& rng) {
  SlotSplit s;
  if (explore_prob <= 0.0) {
    s.exploit = r;
    return s;
  }
  if (explore_prob >= 1.0) {
    s.explore = r;
    return s;
  }
  // Slot-by-slot coin flips: the sum is Binomial(r, p) for any standard
  // library, which keeps seeded runs portable.
  for (std::size_t k = 0; k < r; ++k) {
    if (Uniform01(rng) < explore_prob) ++s.explore;
  }
  s.exploit = r - s.explore;
  return s;
}

FiniteContext::FiniteContext(const AccessGraph& g, const RewardModel& model,
                             ValueOracle& oracle, std::size_t r, double p_pred)
    : graph_(&g),
      model_(&model),
      oracle_(&oracle),
      r_(r),
      p_pred_(p_pred),
      views_(g.num_items(), 0) {}

std::optional<double> FiniteContext::Reported(UserId, ItemId i, std::size_t edge) {
  auto base = oracle_->Report(i, model_->BaseValue(i), views_[i]);
  if (!base) return std::nullopt;
  return *base * model_->EdgeScale(edge);
}

void FiniteContext::MarkExplored(ItemId i) {
  views_[i] = std::max(views_[i], oracle_->views_needed());
}

void FiniteContext::RecordPresentation(const Recommendation& rec) {
  for (ItemId i : rec.items) ++views_[i];
}

PartitionExplorer::PartitionExplorer(std::shared_ptr<const SemiMatching> matching)
    : matching_(std::move(matching)) {
  owned_.resize(matching_->loads.size());
  for (ItemId i = 0; i < matching_->owner.size(); ++i) owned_[matching_->owner[i]].push_back(i);
}

std::vector<ItemId> PartitionExplorer::Draw(FiniteContext& ctx, UserId u,
                                            std::size_t max_count, Rng& rng) {
  std::vector<ItemId> pool;
  for (ItemId i : owned_[u]) {
    if (!ctx.explored(i)) pool.push_back(i);
  }
  std::size_t k = PartialShuffle(std::span<ItemId>(pool), max_count, rng);
  pool.resize(k);
  return pool;
}

const NeighborhoodPartition& InverseDegreeSetExplorer::PartitionFor(const AccessGraph& g,
                                                                    UserId u,
                                                                    std::size_t r) {
  if (cache_.size() < g.num_users()) cache_.resize(g.num_users());
  auto& slot = cache_[u];
  if (!slot) slot = GreedyNeighborhoodPartition(g, u, r);
  return *slot;
}

std::vector<ItemId> InverseDegreeSetExplorer::Draw(FiniteContext& ctx, UserId u,
                                                   std::size_t max_count, Rng& rng) {
  const AccessGraph& g = ctx.graph();
  const NeighborhoodPartition& part = PartitionFor(g, u, ctx.r());
  std::vector<std::size_t> sets;
  for (std::size_t k = 0; k < part.sets.size(); ++k) {
    if (!part.sets[k].empty()) sets.push_back(k);
  }
  std::size_t n_sets = PartialShuffle(std::span<std::size_t>(sets), max_count, rng);
  std::vector<ItemId> out;
  out.reserve(n_sets);
  std::vector<double> weights;
  for (std::size_t j = 0; j < n_sets; ++j) {
    const auto& set = part.sets[sets[j]];
    weights.clear();
    for (ItemId i : set) weights.push_back(1.0 / static_cast<double>(g.item_degree(i)));
    auto pick = WeightedSampleWithoutReplacement(weights, 1, rng);
    out.push_back(set[pick.front()]);
  }
  return out;
}

std::string DegreePowerExplorer::name() const {
  std::ostringstream os;
  os << "degree_power(" << exponent_ << ")";
  return os.str();
}

std::vector<ItemId> DegreePowerExplorer::Draw(FiniteContext& ctx, UserId u,
                                              std::size_t max_count, Rng& rng) {
  const AccessGraph& g = ctx.graph();
  std::vector<ItemId> pool;
  std::vector<double> weights;
  for (ItemId i : g.items_of(u)) {
    if (ctx.explored(i)) continue;
    pool.push_back(i);
    weights.push_back(exponent_ == 0.0
                          ? 1.0
                          : std::pow(static_cast<double>(g.item_degree(i)), exponent_));
  }
  std::vector<ItemId> out;
  for (std::size_t idx : WeightedSampleWithoutReplacement(weights, max_count, rng)) {
    out.push_back(pool[idx]);
  }
  return out;
}

std::vector<ItemId> TopExplored(FiniteContext& ctx, UserId u, std::size_t count,
                                std::span<const ItemId> exclude, Rng& rng) {
  if (count == 0) return {};
  const AccessGraph& g = ctx.graph();
  struct Candidate {
    double value;
    ItemId item;
  };
  std::vector<Candidate> cands;
  auto items = g.items_of(u);
  const std::size_t base = g.user_edge_begin(u);
  for (std::size_t k = 0; k < items.size(); ++k) {
    ItemId i = items[k];
    if (!ctx.explored(i)) continue;
    if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
    auto v = ctx.Reported(u, i, base + k);
    cands.push_back({*v, i});
  }
  auto better = [](const Candidate& a, const Candidate& b) {
    return a.value != b.value ? a.value > b.value : a.item < b.item;
  };
  std::vector<ItemId> out;
  if (ctx.p_pred() >= 1.0) {
    std::size_t take = std::min(count, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take),
                      cands.end(), better);
    for (std::size_t k = 0; k < take; ++k) out.push_back(cands[k].item);
    return out;
  }
  std::sort(cands.begin(), cands.end(), better);
  while (out.size() < count && !cands.empty()) {
    std::size_t idx = 0;
    if (cands.size() > 1 && Uniform01(rng) >= ctx.p_pred()) idx = 1;
    out.push_back(cands[idx].item);
    cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return out;
}

Recommendation AssembleRecommendation(FiniteContext& ctx, UserId u, SlotSplit split,
                                      Explorer& explorer, Rng& rng) {
  Recommendation rec;
  const std::size_t r = split.explore + split.exploit;
  std::vector<ItemId> drawn;
  bool have_draw = false;
  auto draw = [&] {
    if (!have_draw) {
      drawn = explorer.Draw(ctx, u, r, rng);
      have_draw = true;
    }
  };
  std::size_t next_drawn = 0;
  if (split.explore > 0) {
    draw();
    while (rec.size() < split.explore && next_drawn < drawn.size()) {
      rec.add(drawn[next_drawn++], SlotKind::kExplore);
    }
  }
  std::size_t exploit_target = r - rec.size();
  for (ItemId i : TopExplored(ctx, u, exploit_target, rec.items, rng)) {
    rec.add(i, SlotKind::kExploit);
  }
  if (rec.size() < r) {
    draw();
    while (rec.size() < r && next_drawn < drawn.size()) {
      ItemId i = drawn[next_drawn++];
      if (!rec.contains(i)) rec.add(i, SlotKind::kExplore);
    }
  }
  return rec;
}

SplitPolicy::SplitPolicy(std::string name, std::unique_ptr<Explorer> explorer)
    : name_(std::move(name)), explorer_(std::move(explorer)) {}

Recommendation SplitPolicy::Recommend(FiniteContext& ctx, UserId u, Rng& rng) {
  SlotSplit split = SplitSlots(ctx.r(), ExploreProbability(ctx.views_needed()), rng);
  return AssembleRecommendation(ctx, u, split, *explorer_, rng);
}

ThresholdExploitPolicy::ThresholdExploitPolicy(std::string name, double threshold,
                                               std::unique_ptr<Explorer> explorer)
    : name_(std::move(name)), threshold_(threshold), explorer_(std::move(explorer)) {}

Recommendation ThresholdExploitPolicy::Recommend(FiniteContext& ctx, UserId u, Rng& rng) {
  const AccessGraph& g = ctx.graph();
  auto items = g.items_of(u);
  const std::size_t base = g.user_edge_begin(u);
  bool exploit = false;
  for (std::size_t k = 0; k < items.size() && !exploit; ++k) {
    if (auto v = ctx.Reported(u, items[k], base + k); v && *v > threshold_) exploit = true;
  }
  SlotSplit split;
  (exploit ? split.exploit : split.explore) = ctx.r();
  return AssembleRecommendation(ctx, u, split, *explorer_, rng);
}

std::vector<ItemId> TrueTopItems(const AccessGraph& g, const RewardModel& model, UserId u,
                                 std::size_t r) {
  auto items = g.items_of(u);
  const std::size_t base = g.user_edge_begin(u);
  std::vector<std::pair<double, ItemId>> vals;
  vals.reserve(items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    vals.emplace_back(model.EdgeValue(items[k], base + k), items[k]);
  }
  std::size_t take = std::min(r, vals.size());
  std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(take), vals.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<ItemId> out;
  for (std::size_t k = 0; k < take; ++k) out.push_back(vals[k].second);
  return out;
}

Recommendation GeniePolicy::Recommend(FiniteContext& ctx, UserId u, Rng&) {
  Recommendation rec;
  for (ItemId i : TrueTopItems(ctx.graph(), ctx.model(), u, ctx.r())) {
    rec.add(i, ctx.explored(i) ? SlotKind::kExploit : SlotKind::kExplore);
  }
  return rec;
}

Recommendation BpExpRecommend(FiniteContext& ctx, UserId u,
                              std::shared_ptr<const SemiMatching> matching, Rng& rng) {
  PartitionExplorer explorer(std::move(matching));
  SlotSplit split = SplitSlots(ctx.r(), ExploreProbability(ctx.views_needed()), rng);
  return AssembleRecommendation(ctx, u, split, explorer, rng);
}

Recommendation IdExpRecommend(FiniteContext& ctx, UserId u,
                              InverseDegreeSetExplorer& partitions, Rng& rng) {
  SlotSplit split = SplitSlots(ctx.r(), ExploreProbability(ctx.views_needed()), rng);
  return AssembleRecommendation(ctx, u, split, partitions, rng);
}

Recommendation DegreePowerRecommend(FiniteContext& ctx, UserId u, double exponent,
                                    Rng& rng) {
  DegreePowerExplorer explorer(exponent);
  SlotSplit split = SplitSlots(ctx.r(), ExploreProbability(ctx.views_needed()), rng);
  return AssembleRecommendation(ctx, u, split, explorer, rng);
}

Recommendation ExploitWhenPossibleRecommend(FiniteContext& ctx, UserId u,
                                            Explorer& explorer, Rng& rng) {
  return ExploitAboveThresholdRecommend(ctx, u, 0.0, explorer, rng);
}

Recommendation ExploitAboveThresholdRecommend(FiniteContext& ctx, UserId u, double t,
                                              Explorer& explorer, Rng& rng) {
  const AccessGraph& g = ctx.graph();
  auto items = g.items_of(u);
  const std::size_t base = g.user_edge_begin(u);
  bool exploit = false;
  for (std::size_t k = 0; k < items.size() && !exploit; ++k) {
    if (auto v = ctx.Reported(u, items[k], base + k); v && *v > t) exploit = true;
  }
  SlotSplit split;
  (exploit ? split.exploit : split.explore) = ctx.r();
  return AssembleRecommendation(ctx, u, split, explorer, rng);
}

}  // namespace ocf
