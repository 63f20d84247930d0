#include "ocf/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ocf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequireNonNegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw RewardError(std::string(what) + " must be finite and non-negative");
  }
}

}  // namespace

ValueSequence ValueSequence::Constant(double v) {
  ValueSequence s;
  s.kind = Kind::kConstant;
  s.a = v;
  return s;
}

ValueSequence ValueSequence::Geometric(double first, double ratio) {
  ValueSequence s;
  s.kind = Kind::kGeometric;
  s.a = first;
  s.b = ratio;
  return s;
}

ValueSequence ValueSequence::PlantedPosition(std::uint64_t pos, double high, double low) {
  if (pos == 0) throw RewardError("planted position is 1-based");
  ValueSequence s;
  s.kind = Kind::kPlantedPosition;
  s.position = pos;
  s.a = high;
  s.b = low;
  return s;
}

ValueSequence ValueSequence::Explicit(std::vector<double> values) {
  if (values.empty()) throw RewardError("explicit value sequence is empty");
  ValueSequence s;
  s.kind = Kind::kExplicit;
  s.values = std::move(values);
  return s;
}

double ValueSequence::operator()(std::uint64_t k) const {
  switch (kind) {
    case Kind::kConstant:
      return a;
    case Kind::kGeometric:
      return a * std::pow(b, static_cast<double>(k - 1));
    case Kind::kPlantedPosition:
      return k == position ? a : b;
    case Kind::kExplicit:
      return values[(k - 1) % values.size()];
  }
  return 0.0;
}

RewardModel::RewardModel(Payload payload) : payload_(std::move(payload)) { Validate(); }

void RewardModel::Validate() const {
  std::visit(Overloaded{
                 [](const UniversalValues& m) {
                   for (double v : m.values) RequireNonNegative(v, "item value");
                 },
                 [](const PersonalizedValues& m) {
                   for (double v : m.base) RequireNonNegative(v, "base value");
                   for (double s : m.edge_scale) {
                     if (!(s > 0.0) || !std::isfinite(s)) {
                       throw RewardError("personalization scale must be positive");
                     }
                   }
                 },
                 [](const BinaryPlanted&) {},
                 [](const ClassSequences& m) {
                   for (const auto& seq : m.per_class) {
                     RequireNonNegative(seq.a, "sequence parameter");
                     RequireNonNegative(seq.b, "sequence parameter");
                     for (double v : seq.values) RequireNonNegative(v, "sequence value");
                   }
                 },
             },
             payload_);
}

RewardModel RewardModel::Universal(std::vector<double> values) {
  return RewardModel(UniversalValues{std::move(values)});
}

RewardModel RewardModel::Personalized(std::vector<double> base,
                                      std::vector<double> edge_scale) {
  return RewardModel(PersonalizedValues{std::move(base), std::move(edge_scale)});
}

RewardModel RewardModel::Planted(std::size_t n_items, std::vector<ItemId> planted) {
  std::sort(planted.begin(), planted.end());
  planted.erase(std::unique(planted.begin(), planted.end()), planted.end());
  BinaryPlanted m;
  m.mask.assign(n_items, 0);
  for (ItemId i : planted) {
    if (i >= n_items) throw RewardError("planted item " + std::to_string(i) + " out of range");
    m.mask[i] = 1;
  }
  m.planted = std::move(planted);
  return RewardModel(std::move(m));
}

RewardModel RewardModel::TwoLevel(std::size_t n_items, std::span<const ItemId> planted,
                                  double high, double low) {
  std::vector<double> values(n_items, low);
  for (ItemId i : planted) {
    if (i >= n_items) throw RewardError("planted item " + std::to_string(i) + " out of range");
    values[i] = high;
  }
  return Universal(std::move(values));
}

RewardModel RewardModel::Sequences(std::vector<ValueSequence> per_class) {
  return RewardModel(ClassSequences{std::move(per_class)});
}

double RewardModel::BaseValue(ItemId i) const {
  return std::visit(Overloaded{
                        [i](const UniversalValues& m) { return m.values[i]; },
                        [i](const PersonalizedValues& m) { return m.base[i]; },
                        [i](const BinaryPlanted& m) { return m.mask[i] ? 1.0 : 0.0; },
                        [](const ClassSequences&) -> double {
                          throw RewardError("class-sequence model has no per-item base value");
                        },
                    },
                    payload_);
}

double RewardModel::EdgeScale(std::size_t edge) const {
  if (const auto* p = std::get_if<PersonalizedValues>(&payload_)) return p->edge_scale[edge];
  return 1.0;
}

double RewardModel::EdgeValue(ItemId i, std::size_t edge) const {
  return BaseValue(i) * EdgeScale(edge);
}

double RewardModel::Value(const AccessGraph& g, UserId u, ItemId i) const {
  if (is_sequences()) {
    throw RewardError("class-sequence model is queried per (class, ordinal)");
  }
  std::size_t edge = g.edge_index(u, i);
  if (edge == AccessGraph::npos) {
    throw RewardError("user " + std::to_string(u) + " has no access to item " +
                      std::to_string(i));
  }
  return EdgeValue(i, edge);
}

double RewardModel::SequenceValue(ClassId c, std::uint64_t k) const {
  const auto* seq = std::get_if<ClassSequences>(&payload_);
  if (seq == nullptr) throw RewardError("model has no class sequences");
  if (c >= seq->per_class.size()) {
    throw RewardError("class " + std::to_string(c) + " has no value sequence");
  }
  if (k == 0) throw RewardError("class ordinals are 1-based");
  return seq->per_class[c](k);
}

RewardModel PlantedUniform(std::size_t n_items, std::size_t k, Rng& rng) {
  if (k < 1 || k > n_items) {
    throw RewardError("planted set size must lie in [1, n_items]");
  }
  std::vector<ItemId> items(n_items);
  for (ItemId i = 0; i < n_items; ++i) items[i] = i;
  PartialShuffle(std::span<ItemId>(items), k, rng);
  items.resize(k);
  return RewardModel::Planted(n_items, std::move(items));
}

RewardModel ReadUniformValues(std::istream& in, std::size_t n_items) {
  std::vector<double> values(n_items, 0.0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream fields(line);
    long long item = 0;
    double v = 0.0;
    if (!(fields >> item >> v) || item < 0 ||
        static_cast<std::size_t>(item) >= n_items) {
      throw RewardError("values file line " + std::to_string(line_no) +
                        ": expected 'item value' with item in [0, " +
                        std::to_string(n_items) + ")");
    }
    values[static_cast<std::size_t>(item)] = v;
  }
  return RewardModel::Universal(std::move(values));
}

void WriteValues(std::ostream& out, const RewardModel& model, std::size_t n_items) {
  for (ItemId i = 0; i < n_items; ++i) out << i << ' ' << model.BaseValue(i) << '\n';
}

ValueOracle::ValueOracle(std::uint32_t views_needed, double delta, std::uint64_t seed)
    : views_needed_(views_needed), delta_(delta), rng_(seed) {
  if (views_needed_ == 0) throw RewardError("views_needed must be at least 1");
  if (!(delta_ >= 0.0 && delta_ < 0.5)) throw RewardError("delta must lie in [0, 0.5)");
}

std::optional<double> ValueOracle::Report(std::uint64_t key, double true_value,
                                          std::uint32_t view_count) {
  if (view_count < views_needed_) return std::nullopt;
  if (delta_ == 0.0) return true_value;
  std::lock_guard lock(mu_);
  auto [it, inserted] = factor_.try_emplace(key, 1.0);
  if (inserted) {
    it->second = std::uniform_real_distribution<double>(1.0 - delta_, 1.0 + delta_)(rng_);
  }
  return it->second * true_value;
}

void ValueOracle::Forget(std::uint64_t key) {
  if (delta_ == 0.0) return;
  std::lock_guard lock(mu_);
  factor_.erase(key);
}

}  // namespace ocf
