#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ocf/access_graph.hpp"

namespace ocf {

/// Assignment of every item to exactly one neighboring user.
struct SemiMatching {
  std::vector<UserId> owner;       // per item
  std::vector<std::size_t> loads;  // per user, |M(u)|
  std::size_t max_load = 0;

  /// Items owned by `u`, ascending.
  std::vector<ItemId> owned_by(UserId u) const;
};

/// Builds loads/max_load from an owner array.
SemiMatching MakeSemiMatching(std::size_t n_users, std::vector<UserId> owner);

/// Heuristic warm start: items in ascending degree order, each given to its
/// currently least-loaded neighbor (lowest index on ties).
SemiMatching GreedySemiMatching(const AccessGraph& g);

/// Exact minimum-makespan semi-matching. Binary search on the load cap, each
/// cap checked with a max-flow (source -> item -> user -> sink, user capacity
/// equal to the cap). The result's max_load is the optimum d*(G).
SemiMatching BalancedSemiMatching(const AccessGraph& g);

/// True iff every item can be assigned with no user above `cap`. When
/// `owner_out` is non-null and the answer is yes, it receives an assignment.
bool SemiMatchingFeasible(const AccessGraph& g, std::size_t cap,
                          std::vector<UserId>* owner_out = nullptr);

// "i owner(i)" per line.
void WriteSemiMatching(std::ostream& out, const SemiMatching& m);
SemiMatching ReadSemiMatching(std::istream& in, const AccessGraph& g);

/// One user's neighborhood split into r disjoint sets.
struct NeighborhoodPartition {
  UserId user = 0;
  std::vector<std::vector<ItemId>> sets;
  std::vector<double> weights;  // sum of 1/d_i per set

  double max_weight() const;
};

/// Items sorted by descending 1/d_i (ascending item index on ties) and each
/// placed in the currently lightest set (lowest set index on ties). With
/// d_u < r the surplus sets stay empty.
NeighborhoodPartition GreedyNeighborhoodPartition(const AccessGraph& g, UserId u,
                                                  std::size_t r);

struct PartitionBoundReport {
  std::size_t r = 0;
  double z_max = 0.0;
  double bound = 0.0;            // 2 * z_max / r
  double max_set_weight = 0.0;   // over all users and sets
  std::size_t violations = 0;    // (user, set) pairs above bound + 1e-9
  // max(bound, 1). A single item weighs up to 1, so only this form holds
  // unconditionally; the two agree once z_max >= r / 2.
  double capped_bound = 0.0;
  std::size_t capped_violations = 0;
  double slack() const { return bound - max_set_weight; }
  double capped_slack() const { return capped_bound - max_set_weight; }
};

/// Checks max_k W_k against 2 Z_max / r and against max(2 Z_max / r, 1) for
/// every user's greedy partition.
PartitionBoundReport VerifyPartitionBound(const AccessGraph& g, std::size_t r);

}  // namespace ocf
