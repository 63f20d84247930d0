#include "ocf/partitioning.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

namespace ocf {

namespace {

// Dinic max-flow on an adjacency-array graph with integer capacities.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n) : head_(n, -1) {}

  int AddArc(std::size_t from, std::size_t to, long long cap) {
    int id = static_cast<int>(to_.size());
    to_.push_back(to);
    cap_.push_back(cap);
    next_.push_back(head_[from]);
    head_[from] = id;
    to_.push_back(from);
    cap_.push_back(0);
    next_.push_back(head_[to]);
    head_[to] = id + 1;
    return id;
  }

  long long MaxFlow(std::size_t s, std::size_t t) {
    long long flow = 0;
    while (Levels(s, t)) {
      iter_ = head_;
      while (long long pushed = Augment(s, t, std::numeric_limits<long long>::max())) {
        flow += pushed;
      }
    }
    return flow;
  }

  long long residual(int arc) const { return cap_[arc]; }
  std::size_t head_of(int arc) const { return to_[arc]; }

 private:
  bool Levels(std::size_t s, std::size_t t) {
    level_.assign(head_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop();
      for (int a = head_[v]; a != -1; a = next_[a]) {
        if (cap_[a] > 0 && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[v] + 1;
          q.push(to_[a]);
        }
      }
    }
    return level_[t] >= 0;
  }

  long long Augment(std::size_t v, std::size_t t, long long limit) {
    if (v == t) return limit;
    for (int& a = iter_[v]; a != -1; a = next_[a]) {
      std::size_t w = to_[a];
      if (cap_[a] > 0 && level_[w] == level_[v] + 1) {
        long long got = Augment(w, t, std::min(limit, cap_[a]));
        if (got > 0) {
          cap_[a] -= got;
          cap_[a ^ 1] += got;
          return got;
        }
      }
    }
    return 0;
  }

  std::vector<int> head_;
  std::vector<int> iter_;
  std::vector<std::size_t> to_;
  std::vector<long long> cap_;
  std::vector<int> next_;
  std::vector<int> level_;
};

std::vector<ItemId> ItemsByAscendingDegree(const AccessGraph& g) {
  std::vector<ItemId> order(g.num_items());
  std::iota(order.begin(), order.end(), ItemId{0});
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    return g.item_degree(a) < g.item_degree(b);
  });
  return order;
}

}  // namespace

std::vector<ItemId> SemiMatching::owned_by(UserId u) const {
  std::vector<ItemId> out;
  for (ItemId i = 0; i < owner.size(); ++i) {
    if (owner[i] == u) out.push_back(i);
  }
  return out;
}

SemiMatching MakeSemiMatching(std::size_t n_users, std::vector<UserId> owner) {
  SemiMatching m;
  m.loads.assign(n_users, 0);
  for (UserId u : owner) ++m.loads[u];
  m.max_load = m.loads.empty() ? 0 : *std::max_element(m.loads.begin(), m.loads.end());
  m.owner = std::move(owner);
  return m;
}

SemiMatching GreedySemiMatching(const AccessGraph& g) {
  std::vector<UserId> owner(g.num_items(), 0);
  std::vector<std::size_t> load(g.num_users(), 0);
  for (ItemId i : ItemsByAscendingDegree(g)) {
    auto users = g.users_of(i);
    UserId best = users.front();
    for (UserId u : users) {
      if (load[u] < load[best]) best = u;
    }
    owner[i] = best;
    ++load[best];
  }
  return MakeSemiMatching(g.num_users(), std::move(owner));
}

bool SemiMatchingFeasible(const AccessGraph& g, std::size_t cap,
                          std::vector<UserId>* owner_out) {
  const std::size_t n_items = g.num_items();
  const std::size_t n_users = g.num_users();
  // Nodes: source, items, users, sink.
  const std::size_t source = 0;
  const std::size_t item0 = 1;
  const std::size_t user0 = item0 + n_items;
  const std::size_t sink = user0 + n_users;
  FlowNetwork net(sink + 1);
  for (ItemId i = 0; i < n_items; ++i) net.AddArc(source, item0 + i, 1);
  std::vector<int> edge_arcs;
  edge_arcs.reserve(g.num_edges());
  for (ItemId i = 0; i < n_items; ++i) {
    for (UserId u : g.users_of(i)) edge_arcs.push_back(net.AddArc(item0 + i, user0 + u, 1));
  }
  for (UserId u = 0; u < n_users; ++u) {
    net.AddArc(user0 + u, sink, static_cast<long long>(cap));
  }
  long long flow = net.MaxFlow(source, sink);
  if (flow != static_cast<long long>(n_items)) return false;
  if (owner_out != nullptr) {
    owner_out->assign(n_items, 0);
    std::size_t k = 0;
    for (ItemId i = 0; i < n_items; ++i) {
      for (std::size_t j = 0; j < g.item_degree(i); ++j, ++k) {
        int arc = edge_arcs[k];
        if (net.residual(arc) == 0) {
          (*owner_out)[i] = static_cast<UserId>(net.head_of(arc) - user0);
        }
      }
    }
  }
  return true;
}

SemiMatching BalancedSemiMatching(const AccessGraph& g) {
  SemiMatching warm = GreedySemiMatching(g);
  const std::size_t n_users = std::max<std::size_t>(g.num_users(), 1);
  std::size_t lo = std::max<std::size_t>(1, (g.num_items() + n_users - 1) / n_users);
  std::size_t hi = warm.max_load;
  if (lo >= hi) return warm;
  std::vector<UserId> best_owner = warm.owner;
  // Invariant: hi is feasible; every cap below lo is infeasible.
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    std::vector<UserId> owner;
    if (SemiMatchingFeasible(g, mid, &owner)) {
      hi = mid;
      best_owner = std::move(owner);
    } else {
      lo = mid + 1;
    }
  }
  return MakeSemiMatching(g.num_users(), std::move(best_owner));
}

void WriteSemiMatching(std::ostream& out, const SemiMatching& m) {
  for (ItemId i = 0; i < m.owner.size(); ++i) out << i << ' ' << m.owner[i] << '\n';
}

SemiMatching ReadSemiMatching(std::istream& in, const AccessGraph& g) {
  std::vector<UserId> owner(g.num_items(), 0);
  std::vector<char> seen(g.num_items(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream fields(line);
    long long i = -1;
    long long u = -1;
    if (!(fields >> i >> u) || i < 0 || u < 0 ||
        static_cast<std::size_t>(i) >= g.num_items() ||
        !g.has_edge(static_cast<UserId>(u), static_cast<ItemId>(i))) {
      throw GraphError("semi-matching line " + std::to_string(line_no) +
                       ": expected 'item owner' naming an edge of the graph");
    }
    owner[static_cast<std::size_t>(i)] = static_cast<UserId>(u);
    seen[static_cast<std::size_t>(i)] = 1;
  }
  for (ItemId i = 0; i < g.num_items(); ++i) {
    if (!seen[i]) throw GraphError("semi-matching: item " + std::to_string(i) + " has no owner");
  }
  return MakeSemiMatching(g.num_users(), std::move(owner));
}

double NeighborhoodPartition::max_weight() const {
  double w = 0.0;
  for (double x : weights) w = std::max(w, x);
  return w;
}

NeighborhoodPartition GreedyNeighborhoodPartition(const AccessGraph& g, UserId u,
                                                  std::size_t r) {
  if (r == 0) throw GraphError("neighborhood partition needs r >= 1");
  NeighborhoodPartition p;
  p.user = u;
  p.sets.resize(r);
  p.weights.assign(r, 0.0);
  auto neighbors = g.items_of(u);
  std::vector<ItemId> order(neighbors.begin(), neighbors.end());
  // Descending 1/d_i is ascending d_i; neighbors are already index-sorted.
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    return g.item_degree(a) < g.item_degree(b);
  });
  for (ItemId i : order) {
    std::size_t lightest = 0;
    for (std::size_t k = 1; k < r; ++k) {
      if (p.weights[k] < p.weights[lightest]) lightest = k;
    }
    p.sets[lightest].push_back(i);
    p.weights[lightest] += 1.0 / static_cast<double>(g.item_degree(i));
  }
  return p;
}

PartitionBoundReport VerifyPartitionBound(const AccessGraph& g, std::size_t r) {
  PartitionBoundReport rep;
  rep.r = r;
  rep.z_max = ComputeStats(g).z_max;
  rep.bound = 2.0 * rep.z_max / static_cast<double>(r);
  rep.capped_bound = std::max(rep.bound, 1.0);
  for (UserId u = 0; u < g.num_users(); ++u) {
    NeighborhoodPartition p = GreedyNeighborhoodPartition(g, u, r);
    for (double w : p.weights) {
      rep.max_set_weight = std::max(rep.max_set_weight, w);
      if (w > rep.bound + 1e-9) ++rep.violations;
      if (w > rep.capped_bound + 1e-9) ++rep.capped_violations;
    }
  }
  return rep;
}

}  // namespace ocf
