#include "ocf/infinite_policies.hpp"

#include <algorithm>

namespace ocf {

std::vector<std::size_t> VisitSnapshot::latest() const { return at_level(0); }

std::vector<std::size_t> VisitSnapshot::at_level(std::uint32_t level) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k].status == LiveStatus::kCandidate && items[k].counter == level) {
      out.push_back(k);
    }
  }
  return out;
}

std::vector<std::size_t> TopExploredAlive(const VisitSnapshot& visit, std::size_t count,
                                          const VisitRecommendation& rec) {
  std::vector<std::size_t> cands;
  for (std::size_t k = 0; k < visit.items.size(); ++k) {
    const auto& it = visit.items[k];
    if (it.status == LiveStatus::kExplored && it.reported && !rec.contains(it.id)) {
      cands.push_back(k);
    }
  }
  std::size_t take = std::min(count, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take),
                    cands.end(), [&](std::size_t a, std::size_t b) {
                      const auto& x = visit.items[a];
                      const auto& y = visit.items[b];
                      return *x.reported != *y.reported ? *x.reported > *y.reported
                                                        : x.id < y.id;
                    });
  cands.resize(take);
  return cands;
}

namespace {

// Shared tail of both policies: exploit the remaining slots, then top up with
// leftover explore candidates.
void FillRemaining(const VisitSnapshot& visit, VisitRecommendation& rec,
                   std::vector<std::size_t>& leftover) {
  for (std::size_t k : TopExploredAlive(visit, visit.r - rec.size(), rec)) {
    rec.add(visit.items[k].id, SlotKind::kExploit);
  }
  for (std::size_t k : leftover) {
    if (rec.size() >= visit.r) break;
    if (!rec.contains(visit.items[k].id)) rec.add(visit.items[k].id, SlotKind::kExplore);
  }
}

}  // namespace

VisitRecommendation UlExpRecommend(const VisitSnapshot& visit, Rng& rng) {
  SlotSplit split = SplitSlots(visit.r, ExploreProbability(1), rng);
  std::vector<std::size_t> pool = visit.latest();
  // Shuffle the whole pool so its tail doubles as the fallback order.
  PartialShuffle(std::span<std::size_t>(pool), pool.size(), rng);
  VisitRecommendation rec;
  std::size_t used = 0;
  while (rec.size() < split.explore && used < pool.size()) {
    rec.add(visit.items[pool[used++]].id, SlotKind::kExplore);
  }
  std::vector<std::size_t> leftover(pool.begin() + static_cast<std::ptrdiff_t>(used), pool.end());
  FillRemaining(visit, rec, leftover);
  return rec;
}

VisitRecommendation UlExpFRecommend(const VisitSnapshot& visit, Rng& rng) {
  const std::uint32_t f = visit.views_needed;
  SlotSplit split = SplitSlots(visit.r, ExploreProbability(f), rng);
  std::vector<std::vector<std::size_t>> levels(f);
  for (std::uint32_t l = 0; l < f; ++l) levels[l] = visit.at_level(l);
  VisitRecommendation rec;
  for (std::size_t j = 0; j < split.explore; ++j) {
    auto& pool = levels[UniformIndex(rng, f)];
    if (pool.empty()) continue;
    std::size_t pick = UniformIndex(rng, pool.size());
    rec.add(visit.items[pool[pick]].id, SlotKind::kExplore);
    pool[pick] = pool.back();
    pool.pop_back();
  }
  std::vector<std::size_t> leftover;
  for (const auto& pool : levels) leftover.insert(leftover.end(), pool.begin(), pool.end());
  PartialShuffle(std::span<std::size_t>(leftover), leftover.size(), rng);
  FillRemaining(visit, rec, leftover);
  return rec;
}

VisitRecommendation UlExpPolicy::Recommend(const VisitSnapshot& visit, Rng& rng) {
  return UlExpRecommend(visit, rng);
}

VisitRecommendation UlExpFPolicy::Recommend(const VisitSnapshot& visit, Rng& rng) {
  return UlExpFRecommend(visit, rng);
}

VisitRecommendation VisitGeniePolicy::Recommend(const VisitSnapshot& visit, Rng&) {
  std::vector<std::size_t> order(visit.items.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::size_t take = std::min(visit.r, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const auto& x = visit.items[a];
                      const auto& y = visit.items[b];
                      return x.true_value != y.true_value ? x.true_value > y.true_value
                                                          : x.id < y.id;
                    });
  VisitRecommendation rec;
  for (std::size_t k = 0; k < take; ++k) {
    const auto& it = visit.items[order[k]];
    rec.add(it.id, it.status == LiveStatus::kExplored ? SlotKind::kExploit : SlotKind::kExplore);
  }
  return rec;
}

}  // namespace ocf
