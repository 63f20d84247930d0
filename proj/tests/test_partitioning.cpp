#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ocf/access_graph.hpp"
#include "ocf/partitioning.hpp"
#include "ocf/rng.hpp"

namespace ocf {
namespace {

// Enumerates every owner assignment; only for tiny graphs.
std::size_t BruteForceMakespan(const AccessGraph& g) {
  std::vector<std::size_t> choice(g.num_items(), 0);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  while (true) {
    std::vector<std::size_t> load(g.num_users(), 0);
    for (ItemId i = 0; i < g.num_items(); ++i) ++load[g.users_of(i)[choice[i]]];
    best = std::min(best, *std::max_element(load.begin(), load.end()));
    ItemId k = 0;
    while (k < g.num_items() && ++choice[k] == g.item_degree(k)) choice[k++] = 0;
    if (k == g.num_items()) break;
  }
  return best;
}

void ExpectValidMatching(const AccessGraph& g, const SemiMatching& m) {
  ASSERT_EQ(m.owner.size(), g.num_items());
  std::vector<std::size_t> load(g.num_users(), 0);
  for (ItemId i = 0; i < g.num_items(); ++i) {
    EXPECT_TRUE(g.has_edge(m.owner[i], i)) << "item " << i;
    ++load[m.owner[i]];
  }
  EXPECT_EQ(load, m.loads);
  EXPECT_EQ(m.max_load, *std::max_element(load.begin(), load.end()));
}

TEST(SemiMatching, PerfectMatchingHasMakespanOne) {
  AccessGraph g = Biregular(5, 5, 2);
  SemiMatching m = BalancedSemiMatching(g);
  ExpectValidMatching(g, m);
  EXPECT_EQ(m.max_load, 1u);
}

TEST(SemiMatching, CompleteGraphSplitsEvenly) {
  SemiMatching m = BalancedSemiMatching(CompleteBipartite(2, 5));
  EXPECT_EQ(m.max_load, 3u);
  SemiMatching even = BalancedSemiMatching(CompleteBipartite(3, 6));
  EXPECT_EQ(even.max_load, 2u);
}

TEST(SemiMatching, StarsForceFullLoad) {
  AccessGraph g = DisjointStars(2, 3);
  SemiMatching m = BalancedSemiMatching(g);
  ExpectValidMatching(g, m);
  EXPECT_EQ(m.max_load, 3u);
}

TEST(SemiMatching, HatGraphMakespanIsTwo) {
  for (std::size_t n : {1u, 3u, 8u}) {
    SemiMatching m = BalancedSemiMatching(HatGraph(n));
    EXPECT_EQ(m.max_load, 2u) << n;
  }
}

TEST(SemiMatching, MatchesBruteForceOnSmallRandomGraphs) {
  Rng rng(31);
  for (int t = 0; t < 60; ++t) {
    std::size_t nu = 1 + UniformIndex(rng, 4);
    std::size_t ni = 1 + UniformIndex(rng, 8);
    AccessGraph g = RandomBipartite(nu, ni, 0.4, rng);
    SemiMatching m = BalancedSemiMatching(g);
    ExpectValidMatching(g, m);
    EXPECT_EQ(m.max_load, BruteForceMakespan(g));
    EXPECT_LE(m.max_load, GreedySemiMatching(g).max_load);
  }
}

TEST(SemiMatching, FeasibilityIsMonotoneInCap) {
  AccessGraph g = CompleteBipartite(3, 7);
  EXPECT_FALSE(SemiMatchingFeasible(g, 2));
  std::vector<UserId> owner;
  EXPECT_TRUE(SemiMatchingFeasible(g, 3, &owner));
  SemiMatching m = MakeSemiMatching(3, owner);
  ExpectValidMatching(g, m);
  EXPECT_LE(m.max_load, 3u);
  EXPECT_TRUE(SemiMatchingFeasible(g, 7));
}

// The optimum is at most ceil(Z_max): a fractional assignment giving item i
// weight 1/d_i to each neighbor has load Z(u), and the flow polytope is
// integral.
TEST(SemiMatchingProperty, MakespanAtMostCeilZMax) {
  Rng rng(41);
  for (int t = 0; t < 300; ++t) {
    std::size_t nu = 1 + UniformIndex(rng, 12);
    std::size_t ni = 1 + UniformIndex(rng, 30);
    AccessGraph g = RandomBipartite(nu, ni, 0.05 + 0.5 * Uniform01(rng), rng);
    SemiMatching m = BalancedSemiMatching(g);
    double z = ComputeStats(g).z_max;
    EXPECT_LE(static_cast<double>(m.max_load), std::ceil(z - 1e-9) + 1e-9);
    EXPECT_GE(m.max_load, 1u);
  }
}

// The floor form of that bound does not hold: complete 2 x 3 has Z = 1.5 but
// some user must own two items.
TEST(SemiMatching, FloorOfZMaxIsNotABound) {
  AccessGraph g = CompleteBipartite(2, 3);
  EXPECT_NEAR(ComputeStats(g).z_max, 1.5, 1e-12);
  EXPECT_EQ(BalancedSemiMatching(g).max_load, 2u);
}

TEST(SemiMatching, DeterministicAndRoundTrips) {
  Rng rng(5);
  AccessGraph g = RandomBipartite(6, 14, 0.3, rng);
  SemiMatching a = BalancedSemiMatching(g);
  SemiMatching b = BalancedSemiMatching(g);
  EXPECT_EQ(a.owner, b.owner);
  std::stringstream ss;
  WriteSemiMatching(ss, a);
  SemiMatching back = ReadSemiMatching(ss, g);
  EXPECT_EQ(back.owner, a.owner);
  EXPECT_EQ(back.max_load, a.max_load);

  std::istringstream bad("0 5\n");
  EXPECT_ANY_THROW(ReadSemiMatching(bad, g));
}

TEST(SemiMatching, OwnedByListsAscending) {
  SemiMatching m = MakeSemiMatching(2, {1, 0, 1, 1});
  EXPECT_EQ(m.owned_by(1), (std::vector<ItemId>{0, 2, 3}));
  EXPECT_EQ(m.loads, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(m.max_load, 3u);
}

TEST(NeighborhoodPartition, GreedyExample) {
  // User 0 sees items with degrees {1, 1, 2, 2}.
  std::vector<Edge> edges = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};
  AccessGraph g = AccessGraph::FromEdges(edges, 2, 4);
  NeighborhoodPartition p = GreedyNeighborhoodPartition(g, 0, 2);
  ASSERT_EQ(p.sets.size(), 2u);
  EXPECT_NEAR(p.weights[0], 1.5, 1e-12);
  EXPECT_NEAR(p.weights[1], 1.5, 1e-12);
  EXPECT_EQ(p.sets[0], (std::vector<ItemId>{0, 2}));
  EXPECT_EQ(p.sets[1], (std::vector<ItemId>{1, 3}));

  NeighborhoodPartition whole = GreedyNeighborhoodPartition(g, 0, 1);
  EXPECT_NEAR(whole.max_weight(), InverseDegreeMass(g, 0), 1e-12);
}

TEST(NeighborhoodPartition, SurplusSetsStayEmpty) {
  AccessGraph g = CompleteBipartite(1, 2);
  NeighborhoodPartition p = GreedyNeighborhoodPartition(g, 0, 4);
  ASSERT_EQ(p.sets.size(), 4u);
  EXPECT_EQ(p.sets[0].size(), 1u);
  EXPECT_EQ(p.sets[1].size(), 1u);
  EXPECT_TRUE(p.sets[2].empty());
  EXPECT_TRUE(p.sets[3].empty());
  EXPECT_THROW(GreedyNeighborhoodPartition(g, 0, 0), GraphError);
}

// Sets are disjoint, cover N(u), and weights equal the inverse-degree sums.
// The heaviest set weighs at most max(2 Z(u) / r, heaviest item).
TEST(NeighborhoodPartitionProperty, CoverAndCappedBound) {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    std::size_t nu = 1 + UniformIndex(rng, 10);
    std::size_t ni = 1 + UniformIndex(rng, 40);
    AccessGraph g = RandomBipartite(nu, ni, 0.05 + 0.6 * Uniform01(rng), rng);
    std::size_t r = 1 + UniformIndex(rng, 6);
    for (UserId u = 0; u < nu; ++u) {
      NeighborhoodPartition p = GreedyNeighborhoodPartition(g, u, r);
      std::vector<ItemId> all;
      double heaviest_item = 0.0;
      for (std::size_t k = 0; k < p.sets.size(); ++k) {
        double w = 0.0;
        for (ItemId i : p.sets[k]) {
          w += 1.0 / static_cast<double>(g.item_degree(i));
          heaviest_item = std::max(heaviest_item, 1.0 / static_cast<double>(g.item_degree(i)));
          all.push_back(i);
        }
        EXPECT_NEAR(w, p.weights[k], 1e-12);
      }
      std::sort(all.begin(), all.end());
      auto items = g.items_of(u);
      EXPECT_EQ(all, std::vector<ItemId>(items.begin(), items.end()));
      double z = InverseDegreeMass(g, u);
      EXPECT_LE(p.max_weight(),
                std::max(2.0 * z / static_cast<double>(r), heaviest_item) + 1e-9);
    }
    PartitionBoundReport rep = VerifyPartitionBound(g, r);
    EXPECT_EQ(rep.capped_violations, 0u);
    EXPECT_GE(rep.capped_slack(), -1e-9);
    if (rep.z_max >= static_cast<double>(r) / 2.0) {
      EXPECT_EQ(rep.violations, 0u);
    }
  }
}

// Without the cap the bound fails whenever one item alone outweighs it:
// a single user with one private item and r = 4 has 2 Z / r = 0.5 < 1.
TEST(NeighborhoodPartition, UncappedBoundFailsForLightNeighborhoods) {
  AccessGraph g = CompleteBipartite(1, 1);
  PartitionBoundReport rep = VerifyPartitionBound(g, 4);
  EXPECT_NEAR(rep.bound, 0.5, 1e-12);
  EXPECT_NEAR(rep.max_set_weight, 1.0, 1e-12);
  EXPECT_EQ(rep.violations, 1u);
  EXPECT_EQ(rep.capped_violations, 0u);
}

TEST(NeighborhoodPartition, Deterministic) {
  AccessGraph g = HatGraph(9);
  for (UserId u = 0; u < 9; ++u) {
    EXPECT_EQ(GreedyNeighborhoodPartition(g, u, 3).sets,
              GreedyNeighborhoodPartition(g, u, 3).sets);
  }
}

}  // namespace
}  // namespace ocf
