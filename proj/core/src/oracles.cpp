#include "ocf/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <string>

namespace ocf {

RedBlueResult RedBlueExact(std::size_t reds, std::size_t blues) {
  const std::size_t total = reds + blues;
  if (total > 20) throw OracleError("red/blue enumeration is limited to R + B <= 20");
  if (reds == 0) throw OracleError("red/blue enumeration needs at least one red ball");
  RedBlueResult res;
  res.reds = reds;
  res.blues = blues;
  std::vector<std::uint64_t> run_sum(reds, 0);
  // Each mask with `blues` set bits marks the blue positions.
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != blues) continue;
    ++res.arrangements;
    std::size_t red = 0;
    std::size_t run_start = 0;
    for (std::size_t pos = 0; pos <= total; ++pos) {
      bool boundary = pos == total || ((mask >> pos) & 1u);
      if (!boundary) {
        ++red;
        continue;
      }
      for (std::size_t k = run_start; k < red; ++k) run_sum[k] += red - run_start;
      run_start = red;
    }
  }
  res.expected_run.reserve(reds);
  for (std::size_t i = 0; i < reds; ++i) {
    res.expected_run.emplace_back(run_sum[i], res.arrangements);
    if (i == 0 || res.expected_run[i] > res.max) {
      res.max = res.expected_run[i];
      res.argmax = i;
    }
  }
  return res;
}

Rational RedBlueBound(std::size_t reds, std::size_t blues) {
  return Rational(4 * reds, blues + 1) + 2;
}

std::vector<std::vector<Rational>> RdetTable(std::size_t max_users, std::size_t max_items) {
  std::vector<std::vector<Rational>> t(max_users, std::vector<Rational>(max_items));
  for (std::size_t u = 1; u <= max_users; ++u) {
    for (std::size_t i = 1; i <= max_items; ++i) {
      Rational& out = t[u - 1][i - 1];
      if (i == 1) {
        out = Rational(u);
      } else if (u == 1) {
        out = Rational(1, i);
      } else {
        out = Rational(u, i) + Rational(i - 1, i) * t[u - 2][i - 2];
      }
    }
  }
  return t;
}

Rational RdetRecursion(std::size_t n_users, std::size_t n_items) {
  if (n_users == 0 || n_items == 0) throw OracleError("R_det needs n_users, n_items >= 1");
  // Only the diagonal chain (u - k, i - k) is needed.
  std::size_t steps = std::min(n_users, n_items) - 1;
  std::size_t u = n_users - steps;
  std::size_t i = n_items - steps;
  Rational acc = (i == 1) ? Rational(u) : Rational(1, i);
  while (u < n_users) {
    ++u;
    ++i;
    acc = Rational(u, i) + Rational(i - 1, i) * acc;
  }
  return acc;
}

Rational RdetClosedForm(std::size_t n_users, std::size_t n_items) {
  if (n_users == 0 || n_items == 0) throw OracleError("R_det needs n_users, n_items >= 1");
  std::size_t m = std::min(n_users, n_items);
  return Rational(m * (2 * n_users + 1 - m), 2 * n_items);
}

Rational PolicyStateBruteforce(std::size_t n_users, std::size_t n_items) {
  if (n_users == 0 || n_items == 0) throw OracleError("brute force needs n_users, n_items >= 1");
  if (n_users > 5 || n_items > 6) throw OracleError("brute force is limited to 5 users x 6 items");
  const std::size_t n_masks = std::size_t{1} << n_items;
  // value[k][mask]: best expected reward from k remaining users when the
  // planted item is still unknown and `mask` is explored. The planted item is
  // uniform over the unexplored items.
  std::vector<std::vector<Rational>> value(n_users + 1, std::vector<Rational>(n_masks));
  for (std::size_t k = 1; k <= n_users; ++k) {
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      std::size_t unexplored = n_items - static_cast<std::size_t>(std::popcount(mask));
      if (unexplored == 0) continue;  // unreachable: the planted item is known
      Rational best = -1;
      for (std::size_t item = 0; item < n_items; ++item) {
        Rational v;
        if ((mask >> item) & 1u) {
          v = value[k - 1][mask];  // shows a known zero
        } else {
          Rational hit(1, unexplored);
          // Found: this user and every later one earn 1.
          v = hit * Rational(k);
          std::size_t next = mask | (std::size_t{1} << item);
          if (unexplored > 1) v += (1 - hit) * value[k - 1][next];
        }
        best = std::max(best, v);
      }
      value[k][mask] = best;
    }
  }
  return value[n_users][0];
}

NegativeBound NegativeBoundExact(std::size_t n, double exponent, HatPlacement placement) {
  if (n == 0 || n > 10000) throw OracleError("hat-graph oracle needs 1 <= n <= 10^4");
  const double w = std::pow(static_cast<double>(n), exponent);
  NegativeBound res;
  res.optimal_total = static_cast<double>(n);
  // prob[m]: probability that m shared items are explored (and, for the
  // shared placement, the valuable one is still unknown).
  std::vector<double> prob(n + 1, 0.0);
  std::vector<double> next(n + 1, 0.0);
  prob[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t m = 0; m <= std::min(k, n); ++m) {
      if (prob[m] == 0.0) continue;
      const double shared_left = static_cast<double>(n - m);
      const double norm = 1.0 + shared_left * w;
      if (placement == HatPlacement::kPrivateItems) {
        double own = 1.0 / norm;
        res.expected_total += prob[m] * own;
        next[m] += prob[m] * own;
        if (m < n) next[m + 1] += prob[m] * (1.0 - own);
      } else {
        double planted = m < n ? w / norm : 0.0;
        res.expected_total += prob[m] * planted * static_cast<double>(n - k);
        double other_shared = shared_left > 0.0 ? (shared_left - 1.0) * w / norm : 0.0;
        next[m] += prob[m] * (1.0 / norm);
        if (m < n) next[m + 1] += prob[m] * other_shared;
      }
    }
    std::swap(prob, next);
  }
  if (placement == HatPlacement::kPrivateItems) {
    for (std::size_t k = 0; k < n; ++k) {
      res.bound_total += std::min(1.0, 1.0 / (static_cast<double>(n - k) * w));
    }
  } else {
    const double eps = -exponent - 1.0;
    res.bound_total = (static_cast<double>(n) + 1.0) / (2.0 * std::pow(static_cast<double>(n), eps));
  }
  return res;
}

void WriteRedBlueCsv(std::ostream& out, std::size_t max_total) {
  out << "R,B,N,N_double,bound,argmax\n";
  for (std::size_t total = 1; total <= max_total; ++total) {
    for (std::size_t b = 0; b < total; ++b) {
      std::size_t reds = total - b;
      RedBlueResult res = RedBlueExact(reds, b);
      out << reds << ',' << b << ',' << res.max.str() << ','
          << res.max.convert_to<double>() << ',' << RedBlueBound(reds, b).str() << ','
          << res.argmax << '\n';
    }
  }
}

void WriteRdetCsv(std::ostream& out, std::size_t max_users, std::size_t max_items) {
  out << "n_users,n_items,recursion,closed_form,equal\n";
  auto table = RdetTable(max_users, max_items);
  for (std::size_t u = 1; u <= max_users; ++u) {
    for (std::size_t i = 1; i <= max_items; ++i) {
      const Rational& rec = table[u - 1][i - 1];
      Rational closed = RdetClosedForm(u, i);
      out << u << ',' << i << ',' << rec.str() << ',' << closed.str() << ','
          << (rec == closed ? 1 : 0) << '\n';
    }
  }
}

}  // namespace ocf
