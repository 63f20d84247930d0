#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace ocf {

using Rational = boost::multiprecision::cpp_rational;

class OracleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RedBlueResult {
  std::size_t reds = 0;
  std::size_t blues = 0;
  std::uint64_t arrangements = 0;
  // Entry i: expected length of the red run containing the (i+1)-th red ball.
  std::vector<Rational> expected_run;
  Rational max;               // N(R, B)
  std::size_t argmax = 0;     // 0-based red index attaining the max (lowest)
};

/// Exhaustive over all C(R+B, B) equally likely arrangements. R+B <= 20.
RedBlueResult RedBlueExact(std::size_t reds, std::size_t blues);

/// 4R/(B+1) + 2.
Rational RedBlueBound(std::size_t reds, std::size_t blues);

/// Expected total reward of the best deterministic policy on the complete
/// bipartite n_users x n_items game with one uniformly planted unit item and
/// one slot per user, via
///   R(u, i) = u/i + (i-1)/i * R(u-1, i-1),  R(u, 1) = u,  R(1, i) = 1/i.
Rational RdetRecursion(std::size_t n_users, std::size_t n_items);

/// min(u, i) * (2u + 1 - min(u, i)) / (2i).
Rational RdetClosedForm(std::size_t n_users, std::size_t n_items);

/// Full table R(u, i) for 1 <= u <= max_users, 1 <= i <= max_items;
/// entry [u-1][i-1].
std::vector<std::vector<Rational>> RdetTable(std::size_t max_users, std::size_t max_items);

/// Same game solved by exhaustive search over deterministic online policies:
/// state = (explored item set, users still to arrive), action = any item,
/// including already explored ones. n_users <= 5, n_items <= 6.
Rational PolicyStateBruteforce(std::size_t n_users, std::size_t n_items);

enum class HatPlacement {
  kPrivateItems,   // every user's private item is worth 1
  kOneSharedItem,  // a single shared item is worth 1
};

struct NegativeBound {
  double expected_total = 0.0;  // exact expectation of the idealized sampler
  double optimal_total = 0.0;   // n
  double bound_total = 0.0;     // closed-form upper bound on expected_total
  double expected_ratio() const { return expected_total / optimal_total; }
  double bound_ratio() const { return bound_total / optimal_total; }
};

/// Hat graph with n users, r = 1, an explorer that always explores one
/// unexplored neighbor with weight degree^exponent, and every user exploiting
/// once the valuable shared item is known. The state after k arrivals is the
/// number of explored shared items, so the expectation is an O(n^2) dynamic
/// program. Bounds: sum_k min(1, 1/((n-k) n^exponent)) for private items and
/// (n+1)/(2 n^(-exponent-1)) for one shared item.
NegativeBound NegativeBoundExact(std::size_t n, double exponent, HatPlacement placement);

// CSV dumps for documentation tables.
void WriteRedBlueCsv(std::ostream& out, std::size_t max_total);
void WriteRdetCsv(std::ostream& out, std::size_t max_users, std::size_t max_items);

}  // namespace ocf
