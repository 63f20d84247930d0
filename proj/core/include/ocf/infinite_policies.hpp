#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocf/access_graph.hpp"
#include "ocf/policies.hpp"
#include "ocf/rng.hpp"

namespace ocf {

using LiveItemId = std::uint64_t;

enum class LiveStatus : std::uint8_t {
  kCandidate,  // still eligible for exploration
  kExplored,   // value identifiable
  kDiscarded,  // missed a presentation; never explored
};

/// One alive item in a neighboring class, as seen by a visiting user.
struct NeighborItem {
  LiveItemId id = 0;
  ClassId cls = 0;
  // Neighbor visits the item has seen before this one.
  std::uint32_t counter = 0;
  LiveStatus status = LiveStatus::kCandidate;
  std::optional<double> reported;  // set iff explored
  double true_value = 0.0;         // for the genie and for accounting only
};

struct VisitSnapshot {
  UserId user = 0;
  std::size_t r = 1;
  std::uint32_t views_needed = 1;
  std::vector<NeighborItem> items;

  /// Candidates seeing their first neighbor visit: the latest-item set.
  std::vector<std::size_t> latest() const;
  /// Candidates with the given counter.
  std::vector<std::size_t> at_level(std::uint32_t level) const;
};

using VisitRecommendation = BasicRecommendation<LiveItemId>;

class VisitPolicy {
 public:
  virtual ~VisitPolicy() = default;
  virtual VisitRecommendation Recommend(const VisitSnapshot& visit, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

/// Explore slots take latest items uniformly without replacement; exploit
/// slots take the best explored alive neighbors. Same fallbacks as the
/// finite-population policies.
class UlExpPolicy final : public VisitPolicy {
 public:
  VisitRecommendation Recommend(const VisitSnapshot& visit, Rng& rng) override;
  std::string name() const override { return "ulexp"; }
};

/// f-view variant: each explore slot draws a level in {0..f-1} with
/// replacement and then one candidate at that level. An empty level turns the
/// slot into an exploit slot.
class UlExpFPolicy final : public VisitPolicy {
 public:
  VisitRecommendation Recommend(const VisitSnapshot& visit, Rng& rng) override;
  std::string name() const override { return "ulexp_f"; }
};

class VisitGeniePolicy final : public VisitPolicy {
 public:
  VisitRecommendation Recommend(const VisitSnapshot& visit, Rng& rng) override;
  std::string name() const override { return "genie"; }
};

VisitRecommendation UlExpRecommend(const VisitSnapshot& visit, Rng& rng);
VisitRecommendation UlExpFRecommend(const VisitSnapshot& visit, Rng& rng);

/// Snapshot indices of the top `count` explored items by reported value
/// (ties: lower id), skipping ids already in `rec`.
std::vector<std::size_t> TopExploredAlive(const VisitSnapshot& visit, std::size_t count,
                                          const VisitRecommendation& rec);

}  // namespace ocf
