#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ocf/access_graph.hpp"
#include "ocf/rng.hpp"

namespace ocf {

class RewardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Same value V(i) for every neighboring user.
struct UniversalValues {
  std::vector<double> values;
};

/// V(u,i) = scale(u,i) * V(i). Scales are indexed by global edge index
/// (AccessGraph::edge_index) and must be positive, which keeps the per-edge
/// transform invertible.
struct PersonalizedValues {
  std::vector<double> base;
  std::vector<double> edge_scale;
};

/// Binary rewards: items in the planted set are worth 1, the rest 0.
struct BinaryPlanted {
  std::vector<ItemId> planted;  // sorted, unique
  std::vector<char> mask;       // mask[i] != 0 iff i is planted
};

/// Value sequence V_c(k), k = 1, 2, ... for one item class. Fixed before any
/// arrivals happen; it never looks at the sample path.
struct ValueSequence {
  enum class Kind { kConstant, kGeometric, kPlantedPosition, kExplicit };
  Kind kind = Kind::kConstant;
  double a = 1.0;  // constant value | first term | planted value
  double b = 0.0;  // - | ratio | background value
  std::uint64_t position = 1;  // planted position (1-based)
  std::vector<double> values;  // explicit list, extended cyclically

  static ValueSequence Constant(double v);
  /// first * ratio^(k-1)
  static ValueSequence Geometric(double first, double ratio);
  /// `high` at ordinal `pos`, `low` everywhere else.
  static ValueSequence PlantedPosition(std::uint64_t pos, double high, double low);
  static ValueSequence Explicit(std::vector<double> values);

  double operator()(std::uint64_t k) const;
};

struct ClassSequences {
  std::vector<ValueSequence> per_class;
};

class RewardModel {
 public:
  using Payload =
      std::variant<UniversalValues, PersonalizedValues, BinaryPlanted, ClassSequences>;

  explicit RewardModel(Payload payload);

  static RewardModel Universal(std::vector<double> values);
  static RewardModel Personalized(std::vector<double> base,
                                  std::vector<double> edge_scale);
  static RewardModel Planted(std::size_t n_items, std::vector<ItemId> planted);
  /// Binary values: `high` for planted items, `low` elsewhere. Used by the
  /// exploit-rule counterexamples (1 vs delta, delta vs 0).
  static RewardModel TwoLevel(std::size_t n_items, std::span<const ItemId> planted,
                              double high, double low);
  static RewardModel Sequences(std::vector<ValueSequence> per_class);

  const Payload& payload() const { return payload_; }
  bool is_sequences() const { return std::holds_alternative<ClassSequences>(payload_); }

  /// Checked lookup of V(u,i) in the finite setting. Throws RewardError when
  /// (u,i) is not an edge of `g`.
  double Value(const AccessGraph& g, UserId u, ItemId i) const;

  /// Unchecked V(u,i) given the global edge index of (u,i).
  double EdgeValue(ItemId i, std::size_t edge) const;

  /// Intrinsic per-item value before personalization.
  double BaseValue(ItemId i) const;

  /// Per-edge transform applied on top of the base value (1 if none).
  double EdgeScale(std::size_t edge) const;

  /// V_c(k) for the infinite-horizon setting, k >= 1.
  double SequenceValue(ClassId c, std::uint64_t k) const;

 private:
  void Validate() const;
  Payload payload_;
};

/// Binary planted model with `k` items drawn uniformly without replacement.
RewardModel PlantedUniform(std::size_t n_items, std::size_t k, Rng& rng);

/// Universal values file: "i v" per line, '#' comments. Items not listed get 0.
RewardModel ReadUniformValues(std::istream& in, std::size_t n_items);
void WriteValues(std::ostream& out, const RewardModel& model, std::size_t n_items);

/// Post-exploration value estimates. An item becomes identifiable after
/// `views_needed` presentations; its estimate is one draw, uniform in
/// [(1-delta)V, (1+delta)V], memoized so every later query agrees.
class ValueOracle {
 public:
  ValueOracle(std::uint32_t views_needed, double delta, std::uint64_t seed);

  std::uint32_t views_needed() const { return views_needed_; }
  double delta() const { return delta_; }

  /// nullopt while view_count < views_needed.
  std::optional<double> Report(std::uint64_t key, double true_value,
                               std::uint32_t view_count);

  void Forget(std::uint64_t key);

 private:
  std::uint32_t views_needed_;
  double delta_;
  std::mutex mu_;
  Rng rng_;
  std::unordered_map<std::uint64_t, double> factor_;
};

}  // namespace ocf
