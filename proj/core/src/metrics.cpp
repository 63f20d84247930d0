#include "ocf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocf {

void MeanAccumulator::Add(double x) {
  ++n_;
  double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void MeanAccumulator::Merge(const MeanAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double d = other.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  n_ += other.n_;
}

double MeanAccumulator::variance() const {
  return n_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

double MeanAccumulator::half_width(double z) const {
  return n_ < 2 ? 0.0 : z * std::sqrt(variance() / static_cast<double>(n_));
}

RatioEstimate SummarizeUsers(std::vector<UserRatio> users, std::size_t trials,
                             const MeanAccumulator& pooled) {
  RatioEstimate est;
  est.trials = trials;
  est.pooled_mean = pooled.mean();
  est.pooled_half_width = pooled.half_width();
  est.gamma = std::numeric_limits<double>::quiet_NaN();
  for (auto& u : users) {
    if (u.samples == 0) {
      ++est.excluded_users;
      continue;
    }
    if (!est.argmin || u.mean < est.gamma) {
      est.gamma = u.mean;
      est.half_width = u.half_width;
      est.argmin = u.user;
    }
    est.per_user.push_back(u);
  }
  return est;
}

double KolmogorovSurvival(double x) {
  if (x <= 0.0) return 1.0;
  // The alternating series converges slowly near 0, where Q is 1 to double
  // precision anyway.
  if (x < 0.18) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult KsTwoSample(std::vector<double> a, std::vector<double> b) {
  KsResult res;
  if (a.empty() || b.empty()) return res;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  res.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  res.p_value = KolmogorovSurvival((ne + 0.12 + 0.11 / ne) * d);
  return res;
}

double MinIndicatorFactor(std::span<const double> hit_rates) {
  if (hit_rates.empty()) return 0.0;
  return *std::min_element(hit_rates.begin(), hit_rates.end());
}

bool MinIndicatorHolds(double mean_reward, std::span<const double> hit_rates, double optimal,
                       double slack) {
  return mean_reward >= MinIndicatorFactor(hit_rates) * optimal - slack;
}

}  // namespace ocf
