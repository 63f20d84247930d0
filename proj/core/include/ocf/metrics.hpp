#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ocf/access_graph.hpp"

namespace ocf {

/// Running mean and variance (Welford). Merging is exact up to rounding and
/// deterministic for a fixed merge order.
class MeanAccumulator {
 public:
  void Add(double x);
  void Merge(const MeanAccumulator& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double sum() const { return mean_ * static_cast<double>(n_); }
  /// Sample variance (n - 1 denominator); 0 for fewer than two samples.
  double variance() const;
  /// z * sd / sqrt(n); 0 for fewer than two samples.
  double half_width(double z = 1.96) const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct UserRatio {
  UserId user = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double half_width = 0.0;
};

/// Worst-user estimate of the competitive ratio.
struct RatioEstimate {
  double gamma = 0.0;       // min over users of the per-user mean ratio
  double half_width = 0.0;  // 95% half-width of the minimizing user's mean
  std::optional<UserId> argmin;
  std::vector<UserRatio> per_user;  // users with at least one defined ratio
  std::size_t excluded_users = 0;   // users whose optimum was always 0
  double pooled_mean = 0.0;         // mean ratio over all (user, sample) pairs
  double pooled_half_width = 0.0;
  std::size_t trials = 0;
};

/// Builds the estimate from per-user summaries; entries with samples == 0 are
/// counted as excluded.
RatioEstimate SummarizeUsers(std::vector<UserRatio> users, std::size_t trials,
                             const MeanAccumulator& pooled);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2).
double KolmogorovSurvival(double x);

/// Two-sample Kolmogorov-Smirnov test with the usual small-sample correction
/// of the effective size. Ties make the test conservative.
KsResult KsTwoSample(std::vector<double> a, std::vector<double> b);

/// min_k P[user is shown its k-th best item], the factor in the min-indicator
/// lower bound E[R(u)] >= (min_k P[shown i*_k]) * R*(u).
double MinIndicatorFactor(std::span<const double> hit_rates);

/// True when mean_reward >= MinIndicatorFactor(hit_rates) * optimal - slack.
bool MinIndicatorHolds(double mean_reward, std::span<const double> hit_rates, double optimal,
                       double slack);

}  // namespace ocf
