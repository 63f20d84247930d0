#include "ocf/access_graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace ocf {

namespace {

template <class Index>
void BuildCsr(std::size_t n_rows, const std::vector<std::pair<std::size_t, Index>>& pairs,
              std::vector<std::size_t>& offsets, std::vector<Index>& adj) {
  offsets.assign(n_rows + 1, 0);
  for (const auto& [row, col] : pairs) ++offsets[row + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adj.resize(pairs.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [row, col] : pairs) adj[cursor[row]++] = col;
}

}  // namespace

AccessGraph AccessGraph::FromEdges(std::span<const Edge> edges,
                                   std::size_t n_users, std::size_t n_items) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  for (const Edge& e : sorted) {
    if (e.user >= n_users) {
      throw GraphError("edge (" + std::to_string(e.user) + ", " +
                       std::to_string(e.item) + "): user index out of range [0, " +
                       std::to_string(n_users) + ")");
    }
    if (e.item >= n_items) {
      throw GraphError("edge (" + std::to_string(e.user) + ", " +
                       std::to_string(e.item) + "): item index out of range [0, " +
                       std::to_string(n_items) + ")");
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  AccessGraph g;
  std::vector<std::pair<std::size_t, ItemId>> by_user;
  by_user.reserve(sorted.size());
  for (const Edge& e : sorted) by_user.emplace_back(e.user, e.item);
  BuildCsr(n_users, by_user, g.user_offsets_, g.user_adj_);

  // Iterating user-major keeps each item's user list sorted.
  std::vector<std::pair<std::size_t, UserId>> by_item;
  by_item.reserve(sorted.size());
  for (const Edge& e : sorted) by_item.emplace_back(e.item, e.user);
  BuildCsr(n_items, by_item, g.item_offsets_, g.item_adj_);

  for (ItemId i = 0; i < n_items; ++i) {
    if (g.item_degree(i) == 0) {
      throw GraphError("item " + std::to_string(i) +
                       " has no neighboring user and can never be shown");
    }
  }
  return g;
}

std::size_t AccessGraph::edge_index(UserId u, ItemId i) const {
  if (u >= num_users()) return npos;
  auto items = items_of(u);
  auto it = std::lower_bound(items.begin(), items.end(), i);
  if (it == items.end() || *it != i) return npos;
  return user_offsets_[u] + static_cast<std::size_t>(it - items.begin());
}

bool AccessGraph::has_edge(UserId u, ItemId i) const {
  return edge_index(u, i) != npos;
}

std::vector<Edge> AccessGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (UserId u = 0; u < num_users(); ++u) {
    for (ItemId i : items_of(u)) out.push_back({u, i});
  }
  return out;
}

double InverseDegreeMass(const AccessGraph& g, UserId u) {
  std::vector<std::size_t> degrees;
  degrees.reserve(g.user_degree(u));
  for (ItemId i : g.items_of(u)) degrees.push_back(g.item_degree(i));
  // Largest degrees first: add the small reciprocals before the large ones.
  std::sort(degrees.begin(), degrees.end(), std::greater<>());
  double z = 0.0;
  for (std::size_t d : degrees) z += 1.0 / static_cast<double>(d);
  return z;
}

GraphStats ComputeStats(const AccessGraph& g) {
  GraphStats s;
  s.z_per_user.resize(g.num_users());
  for (UserId u = 0; u < g.num_users(); ++u) {
    s.z_per_user[u] = InverseDegreeMass(g, u);
    s.z_max = std::max(s.z_max, s.z_per_user[u]);
    ++s.user_degree_histogram[g.user_degree(u)];
  }
  for (ItemId i = 0; i < g.num_items(); ++i) ++s.item_degree_histogram[g.item_degree(i)];
  return s;
}

AccessGraph CompleteBipartite(std::size_t n_users, std::size_t n_items) {
  if (n_users == 0 || n_items == 0) {
    throw GraphError("complete bipartite graph needs at least one user and one item");
  }
  std::vector<Edge> edges;
  edges.reserve(n_users * n_items);
  for (UserId u = 0; u < n_users; ++u) {
    for (ItemId i = 0; i < n_items; ++i) edges.push_back({u, i});
  }
  return AccessGraph::FromEdges(edges, n_users, n_items);
}

AccessGraph HatGraph(std::size_t n) {
  if (n == 0) throw GraphError("hat graph needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(n + n * n);
  for (UserId u = 0; u < n; ++u) {
    edges.push_back({u, static_cast<ItemId>(u)});
    for (std::size_t i = n; i < 2 * n; ++i) edges.push_back({u, static_cast<ItemId>(i)});
  }
  return AccessGraph::FromEdges(edges, n, 2 * n);
}

AccessGraph Biregular(std::size_t n_users, std::size_t n_items,
                      std::size_t user_degree) {
  if (n_users == 0 || n_items == 0 || user_degree == 0) {
    throw GraphError("bi-regular graph needs positive sizes and degree");
  }
  if (user_degree > n_items) {
    throw GraphError("bi-regular graph: user degree " + std::to_string(user_degree) +
                     " exceeds item count " + std::to_string(n_items));
  }
  if ((n_users * user_degree) % n_items != 0) {
    throw GraphError("bi-regular graph: n_users*user_degree = " +
                     std::to_string(n_users * user_degree) +
                     " is not a multiple of n_items = " + std::to_string(n_items));
  }
  std::vector<Edge> edges;
  edges.reserve(n_users * user_degree);
  for (UserId u = 0; u < n_users; ++u) {
    for (std::size_t k = 0; k < user_degree; ++k) {
      edges.push_back({u, static_cast<ItemId>((u * user_degree + k) % n_items)});
    }
  }
  return AccessGraph::FromEdges(edges, n_users, n_items);
}

AccessGraph DisjointStars(std::size_t n_users, std::size_t items_per_user) {
  if (n_users == 0 || items_per_user == 0) {
    throw GraphError("disjoint stars need n_users >= 1 and items_per_user >= 1");
  }
  std::vector<Edge> edges;
  edges.reserve(n_users * items_per_user);
  for (UserId u = 0; u < n_users; ++u) {
    for (std::size_t k = 0; k < items_per_user; ++k) {
      edges.push_back({u, static_cast<ItemId>(u * items_per_user + k)});
    }
  }
  return AccessGraph::FromEdges(edges, n_users, n_users * items_per_user);
}

AccessGraph RandomBipartite(std::size_t n_users, std::size_t n_items, double p,
                            Rng& rng) {
  if (n_users == 0 || n_items == 0) {
    throw GraphError("random bipartite graph needs positive sizes");
  }
  std::vector<Edge> edges;
  std::bernoulli_distribution coin(p);
  for (ItemId i = 0; i < n_items; ++i) {
    bool any = false;
    for (UserId u = 0; u < n_users; ++u) {
      if (coin(rng)) {
        edges.push_back({u, i});
        any = true;
      }
    }
    if (!any) edges.push_back({static_cast<UserId>(UniformIndex(rng, n_users)), i});
  }
  return AccessGraph::FromEdges(edges, n_users, n_items);
}

}  // namespace ocf
