#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocf/access_graph.hpp"
#include "ocf/policy_spec.hpp"
#include "ocf/reward_model.hpp"
#include "ocf/sim_finite.hpp"
#include "ocf/sim_infinite.hpp"
#include "ocf/tools/config.hpp"

namespace ocf::tools {

/// `name` or `name(arg, arg, ...)` with flat, unparsed arguments.
struct CallExpr {
  std::string name;
  std::vector<std::string> args;

  static CallExpr Parse(std::string_view text);
  double Number(std::size_t k) const;
  std::size_t Count(std::size_t k) const;
  void ExpectArgs(std::size_t min, std::size_t max) const;
  std::string ToString() const;
};

/// complete_bipartite(nu, ni) | hat(n) | biregular(nu, ni, d) |
/// disjoint_stars(nu, k) | random(nu, ni, p) | file(path)
AccessGraph BuildGraph(const std::string& spec, std::uint64_t seed);

/// Finite-setting value models, redrawn per trial where random:
///   planted(k)                       k unit items uniformly among all items
///   planted_range(first, count, k)   k unit items uniformly in a range
///   two_level(k, high, low)          k items at `high`, the rest at `low`
///   random_values                    independent uniform [0, 1) values
///   values(path)                     fixed values file
/// `scale` optionally personalizes: uniform_scale(lo, hi) draws one positive
/// factor per edge and trial.
ModelGenerator BuildModelGenerator(const std::string& reward, const std::string& scale,
                                   const AccessGraph& g);

/// Class sequences for the infinite setting, one spec for every class:
///   constant(v) | geometric(first, ratio) | planted_position(pos, high, low)
///   | explicit(v1, v2, ...) | planted_cycle(period, high, low)
/// planted_cycle gives class c the value `high` at ordinals k with
/// k - 1 congruent to c mod period and `low` elsewhere.
RewardModel BuildSequences(const std::string& spec, std::size_t n_classes);

enum class Setting { kFinite, kInfinite };

struct ExperimentConfig {
  Setting setting = Setting::kFinite;
  std::string graph;
  std::string reward;    // finite
  std::string scale;     // finite, optional
  std::string sequences; // infinite
  std::vector<PolicySpec> policies;
  std::size_t r = 1;
  std::uint32_t views_needed = 1;
  double delta = 0.0;
  double p_pred = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
  std::string out = ".";
  bool per_trial = false;
  // Infinite setting.
  std::vector<double> user_rates{1.0};
  std::vector<double> class_rates{1.0};
  double tau = 1.0;
  double horizon = 1000.0;
  std::optional<double> warmup;

  static ExperimentConfig FromConfig(const Config& cfg);
};

struct AggregateRow {
  std::string policy;
  RatioEstimate estimate;
  std::optional<double> mean_latest_size;  // infinite only
  double seconds = 0.0;
};

/// Runs every policy on common random numbers and writes
///   <out>/aggregate.csv   one row per policy (deterministic for a seed)
///   <out>/timing.csv      wall-clock seconds per policy
///   <out>/trials_<k>.csv  per-trial or per-visit rows when per_trial is set
/// Throws ConfigError when <out> is not an existing directory.
std::vector<AggregateRow> RunExperiment(const ExperimentConfig& cfg, std::ostream* log);

inline constexpr const char* kAggregateCsvHeader =
    "policy,setting,r,f,delta,trials,seed,gamma,ci_half_width,argmin_user,pooled_mean,"
    "pooled_ci_half_width,excluded_users,mean_latest_size";

}  // namespace ocf::tools
