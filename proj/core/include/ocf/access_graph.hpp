#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ocf/rng.hpp"

namespace ocf {

using UserId = std::uint32_t;
// In the infinite-horizon setting the same index type names an item class.
using ItemId = std::uint32_t;
using ClassId = ItemId;

struct Edge {
  UserId user;
  ItemId item;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable bipartite access graph between users and items (or item
/// classes). Both sides are stored CSR-style with sorted neighbor lists.
class AccessGraph {
 public:
  AccessGraph() = default;

  /// Deduplicates and sorts `edges`. Throws GraphError on an out-of-range
  /// index or on an item with no neighbors.
  static AccessGraph FromEdges(std::span<const Edge> edges, std::size_t n_users,
                               std::size_t n_items);

  std::size_t num_users() const { return user_offsets_.empty() ? 0 : user_offsets_.size() - 1; }
  std::size_t num_items() const { return item_offsets_.empty() ? 0 : item_offsets_.size() - 1; }
  std::size_t num_edges() const { return user_adj_.size(); }

  std::span<const ItemId> items_of(UserId u) const {
    return {user_adj_.data() + user_offsets_[u],
            user_adj_.data() + user_offsets_[u + 1]};
  }
  std::span<const UserId> users_of(ItemId i) const {
    return {item_adj_.data() + item_offsets_[i],
            item_adj_.data() + item_offsets_[i + 1]};
  }

  std::size_t user_degree(UserId u) const {
    return user_offsets_[u + 1] - user_offsets_[u];
  }
  std::size_t item_degree(ItemId i) const {
    return item_offsets_[i + 1] - item_offsets_[i];
  }

  // Position of the user's first edge in the global user-major edge order.
  // Edge (u, items_of(u)[k]) has index user_edge_begin(u) + k.
  std::size_t user_edge_begin(UserId u) const { return user_offsets_[u]; }

  bool has_edge(UserId u, ItemId i) const;
  // Global edge index of (u, i), or npos when absent.
  std::size_t edge_index(UserId u, ItemId i) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<Edge> edges() const;

 private:
  std::vector<std::size_t> user_offsets_;
  std::vector<ItemId> user_adj_;
  std::vector<std::size_t> item_offsets_;
  std::vector<UserId> item_adj_;
};

struct GraphStats {
  // Z(u) = sum over neighbors i of 1/d_i.
  std::vector<double> z_per_user;
  double z_max = 0.0;
  // degree -> number of nodes with that degree
  std::map<std::size_t, std::size_t> user_degree_histogram;
  std::map<std::size_t, std::size_t> item_degree_histogram;
};

GraphStats ComputeStats(const AccessGraph& g);

/// Z(u) alone, summed smallest-reciprocal first.
double InverseDegreeMass(const AccessGraph& g, UserId u);

// Generators for the graph families used by the experiments.
AccessGraph CompleteBipartite(std::size_t n_users, std::size_t n_items);

/// n users, 2n items: user j sees its private item j, and items n..2n-1 are
/// shared by every user. Z_max = 2 for every n.
AccessGraph HatGraph(std::size_t n);

/// Circulant bi-regular graph: user u sees items (u*d + k) mod n_items for
/// k < d. Requires n_users*d to be a multiple of n_items and d <= n_items.
AccessGraph Biregular(std::size_t n_users, std::size_t n_items,
                      std::size_t user_degree);

/// Every user owns `items_per_user` private degree-1 items.
AccessGraph DisjointStars(std::size_t n_users, std::size_t items_per_user);

/// Each edge present independently with probability p. Items left isolated
/// are attached to one uniformly chosen user so the result is always valid.
AccessGraph RandomBipartite(std::size_t n_users, std::size_t n_items, double p,
                            Rng& rng);

// Plain-text edge list: header "n_users n_items", then "u i" per line.
// Lines starting with '#' and blank lines are ignored.
AccessGraph ReadGraph(std::istream& in);
AccessGraph ReadGraphFile(const std::string& path);
void WriteGraph(std::ostream& out, const AccessGraph& g);

}  // namespace ocf
