#include "ocf/rng.hpp"

#include <algorithm>

namespace ocf {

std::vector<std::size_t> WeightedSampleWithoutReplacement(
    std::span<const double> weights, std::size_t k, Rng& rng) {
  std::vector<double> w(weights.begin(), weights.end());
  double total = 0.0;
  std::size_t positive = 0;
  for (double x : w) {
    if (x > 0.0) {
      total += x;
      ++positive;
    }
  }
  k = std::min(k, positive);
  std::vector<std::size_t> drawn;
  drawn.reserve(k);
  while (drawn.size() < k) {
    double target = Uniform01(rng) * total;
    std::size_t pick = w.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] <= 0.0) continue;
      acc += w[j];
      pick = j;
      if (target < acc) break;
    }
    drawn.push_back(pick);
    total -= w[pick];
    w[pick] = 0.0;
    // Guard against drift after many subtractions.
    if (drawn.size() % 16 == 0) {
      total = 0.0;
      for (double x : w) total += x;
    }
  }
  return drawn;
}

}  // namespace ocf
