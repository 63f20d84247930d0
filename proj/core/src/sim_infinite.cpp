#include "ocf/sim_infinite.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ocf/csv.hpp"
#include "ocf/parallel.hpp"

namespace ocf {

namespace {

void CheckRates(const std::vector<double>& rates, std::size_t n, const char* side) {
  if (rates.size() != 1 && rates.size() != n) {
    throw std::invalid_argument(std::string(side) + " rates: expected 1 or " +
                                std::to_string(n) + " values, got " +
                                std::to_string(rates.size()));
  }
  for (double x : rates) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument(std::string(side) + " rates must be finite and >= 0");
    }
  }
}

struct LiveItem {
  ClassId cls = 0;
  double arrival = 0.0;
  std::uint64_t ordinal = 0;
  std::uint64_t visits_at_arrival = 0;
  LiveStatus status = LiveStatus::kCandidate;
  double value = 0.0;
};

}  // namespace

void InfiniteConfig::Validate(const AccessGraph& g) const {
  CheckRates(user_rates, g.num_users(), "user");
  CheckRates(class_rates, g.num_items(), "class");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(warmup_time() >= 0.0) || !(warmup_time() < horizon)) {
    throw std::invalid_argument("warmup must lie in [0, horizon)");
  }
  if (r == 0) throw std::invalid_argument("r must be >= 1");
  if (views_needed == 0) throw std::invalid_argument("f must be >= 1");
  if (!(delta >= 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in [0, 0.5)");
}

EventSampler::EventSampler(const InfiniteConfig& cfg, std::size_t n_users,
                           std::size_t n_classes)
    : n_users_(n_users) {
  cumulative_.reserve(n_users + n_classes);
  for (UserId u = 0; u < n_users; ++u) {
    total_ += cfg.user_rate(u);
    cumulative_.push_back(total_);
  }
  for (ClassId c = 0; c < n_classes; ++c) {
    total_ += cfg.class_rate(c);
    cumulative_.push_back(total_);
  }
}

Event EventSampler::Next(double now, Rng& rng) const {
  Event e;
  if (!(total_ > 0.0)) return e;
  e.time = now - std::log1p(-Uniform01(rng)) / total_;
  double mark = Uniform01(rng) * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), mark);
  // upper_bound never lands on a zero-rate node.
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                        cumulative_.size() - 1);
  if (k < n_users_) {
    e.kind = Event::Kind::kVisit;
    e.node = static_cast<std::uint32_t>(k);
  } else {
    e.kind = Event::Kind::kArrival;
    e.node = static_cast<std::uint32_t>(k - n_users_);
  }
  return e;
}

InfiniteRun RunInfinite(const AccessGraph& g, const InfiniteConfig& cfg,
                        const RewardModel& model, VisitPolicy& policy, std::uint64_t seed,
                        std::size_t trial, bool keep_shown) {
  cfg.Validate(g);
  const std::size_t n_classes = g.num_items();
  const std::uint32_t f = cfg.views_needed;
  const double warmup = cfg.warmup_time();

  EventSampler sampler(cfg, g.num_users(), n_classes);
  Rng event_rng = MakeRng(seed, trial, Stream::kEvents);
  Rng policy_rng = MakeRng(seed, trial, Stream::kPolicy);
  ValueOracle oracle(f, cfg.delta, DeriveSeed(seed, trial, Stream::kOracle));

  std::vector<LiveItem> items;
  std::vector<std::deque<LiveItemId>> alive(n_classes);
  std::vector<std::uint64_t> class_visits(n_classes, 0);
  std::vector<std::uint64_t> class_arrivals(n_classes, 0);

  InfiniteRun run;
  run.latest_per_class.resize(n_classes);
  auto& book = run.bookkeeping;

  auto expire = [&](ClassId c, double now) {
    auto& q = alive[c];
    while (!q.empty() && items[q.front()].arrival + cfg.tau <= now) {
      const LiveItem& it = items[q.front()];
      if (it.status == LiveStatus::kCandidate && class_visits[c] == it.visits_at_arrival) {
        ++book.expired_unseen;
      }
      oracle.Forget(q.front());
      q.pop_front();
    }
  };

  VisitSnapshot snap;
  snap.r = cfg.r;
  snap.views_needed = f;
  std::vector<std::size_t> latest_count(n_classes, 0);
  std::uint64_t s = 0;
  double now = 0.0;

  for (;;) {
    Event e = sampler.Next(now, event_rng);
    if (!(e.time < cfg.horizon)) break;
    now = e.time;

    if (e.kind == Event::Kind::kArrival) {
      ClassId c = e.node;
      LiveItem it;
      it.cls = c;
      it.arrival = now;
      it.ordinal = ++class_arrivals[c];
      it.visits_at_arrival = class_visits[c];
      it.value = model.SequenceValue(c, it.ordinal);
      alive[c].push_back(items.size());
      items.push_back(it);
      ++book.arrivals;
      continue;
    }

    const UserId u = e.node;
    auto classes = g.items_of(u);
    snap.user = u;
    snap.items.clear();
    for (ClassId c : classes) {
      expire(c, now);
      latest_count[c] = 0;
      for (LiveItemId id : alive[c]) {
        const LiveItem& it = items[id];
        NeighborItem n;
        n.id = id;
        n.cls = c;
        n.counter = static_cast<std::uint32_t>(
            std::min<std::uint64_t>(class_visits[c] - it.visits_at_arrival, f));
        n.status = it.status;
        n.true_value = it.value;
        if (it.status == LiveStatus::kExplored) n.reported = oracle.Report(id, it.value, f);
        if (n.status == LiveStatus::kCandidate && n.counter == 0) ++latest_count[c];
        snap.items.push_back(n);
      }
    }

    VisitRecommendation rec = policy.Recommend(snap, policy_rng);
    if (rec.size() > cfg.r) {
      throw std::logic_error(policy.name() + " returned more than r items");
    }
    for (LiveItemId id : rec.items) {
      if (std::count(rec.items.begin(), rec.items.end(), id) != 1) {
        throw std::logic_error(policy.name() + " recommended an item twice");
      }
      auto hit = std::find_if(snap.items.begin(), snap.items.end(),
                              [id](const NeighborItem& n) { return n.id == id; });
      if (hit == snap.items.end()) {
        throw std::logic_error(policy.name() + " recommended an item that is not available");
      }
    }

    // Earned and optimal reward from the snapshot's true values.
    std::vector<double> values;
    values.reserve(snap.items.size());
    for (const auto& n : snap.items) values.push_back(n.true_value);
    std::size_t take = std::min(cfg.r, values.size());
    std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(take),
                      values.end(), std::greater<>());
    double optimal = 0.0;
    for (std::size_t k = 0; k < take; ++k) optimal += values[k];
    double reward = 0.0;
    std::size_t latest_size = 0;
    for (const auto& n : snap.items) {
      bool shown = rec.contains(n.id);
      if (shown) reward += n.true_value;
      if (n.status != LiveStatus::kCandidate) continue;
      if (n.counter == 0) ++latest_size;
      LiveItem& it = items[n.id];
      if (!shown) {
        it.status = LiveStatus::kDiscarded;
      } else if (n.counter + 1 >= f) {
        it.status = LiveStatus::kExplored;
      }
    }
    book.consumed += latest_size;
    for (ClassId c : classes) ++class_visits[c];

    if (now >= warmup) {
      for (ClassId c : classes) run.latest_per_class[c].Add(static_cast<double>(latest_count[c]));
      VisitRecord vr;
      vr.s = s;
      vr.user = u;
      vr.time = now;
      vr.latest_size = latest_size;
      vr.reward = reward;
      vr.optimal = optimal;
      if (keep_shown) vr.shown = rec.items;
      run.visits.push_back(std::move(vr));
    }
    ++s;
  }

  for (ClassId c = 0; c < n_classes; ++c) {
    expire(c, cfg.horizon);
    for (LiveItemId id : alive[c]) {
      const LiveItem& it = items[id];
      if (it.status == LiveStatus::kCandidate && class_visits[c] == it.visits_at_arrival) {
        ++book.pending_at_end;
      }
    }
  }
  return run;
}

InfiniteEstimate EstimateGammaInfinite(const InfiniteEstimateRequest& req) {
  const AccessGraph& g = *req.graph;
  req.config.Validate(g);
  const std::size_t n_users = g.num_users();
  const std::size_t n_classes = g.num_items();
  const std::size_t n_blocks = (req.trials + kTrialBlock - 1) / kTrialBlock;
  const double mid = 0.5 * (req.config.warmup_time() + req.config.horizon);

  struct Block {
    std::vector<MeanAccumulator> pooled_user;
    std::vector<MeanAccumulator> batch_user;
    MeanAccumulator pooled;
    MeanAccumulator latest;
    MeanAccumulator first_half;
    MeanAccumulator second_half;
    std::vector<MeanAccumulator> per_class;
    LatestSetBookkeeping book;
    std::vector<double> ratios;
    std::string csv;
  };
  std::vector<Block> blocks(n_blocks);

  ForEachBlock(req.trials, req.jobs, [&](std::size_t b, std::size_t first, std::size_t end) {
    Block& out = blocks[b];
    out.pooled_user.resize(n_users);
    out.batch_user.resize(n_users);
    out.per_class.resize(n_classes);
    std::ostringstream csv;
    std::unique_ptr<VisitPolicy> policy = req.policy();
    std::vector<MeanAccumulator> trial_user(n_users);
    for (std::size_t trial = first; trial < end; ++trial) {
      InfiniteRun run = RunInfinite(g, req.config, *req.model, *policy, req.seed, trial);
      std::fill(trial_user.begin(), trial_user.end(), MeanAccumulator{});
      for (const VisitRecord& v : run.visits) {
        out.latest.Add(static_cast<double>(v.latest_size));
        auto ratio = v.ratio();
        if (ratio) {
          trial_user[v.user].Add(*ratio);
          out.pooled_user[v.user].Add(*ratio);
          out.pooled.Add(*ratio);
          (v.time < mid ? out.first_half : out.second_half).Add(*ratio);
          if (req.ratios_out != nullptr) out.ratios.push_back(*ratio);
        }
        if (req.visit_csv != nullptr) {
          csv << trial << ',' << v.s << ',' << v.user << ',' << FormatNumber(v.time) << ','
              << v.latest_size << ',' << FormatNumber(v.reward) << ','
              << FormatNumber(v.optimal) << ',';
          if (ratio) csv << FormatNumber(*ratio);
          csv << '\n';
        }
      }
      for (UserId u = 0; u < n_users; ++u) {
        if (trial_user[u].count() > 0) out.batch_user[u].Add(trial_user[u].mean());
      }
      for (ClassId c = 0; c < n_classes; ++c) out.per_class[c].Merge(run.latest_per_class[c]);
      out.book.arrivals += run.bookkeeping.arrivals;
      out.book.consumed += run.bookkeeping.consumed;
      out.book.expired_unseen += run.bookkeeping.expired_unseen;
      out.book.pending_at_end += run.bookkeeping.pending_at_end;
    }
    out.csv = csv.str();
  });

  InfiniteEstimate est;
  std::vector<MeanAccumulator> pooled_user(n_users);
  std::vector<MeanAccumulator> batch_user(n_users);
  MeanAccumulator pooled;
  est.latest_per_class.resize(n_classes);
  for (Block& b : blocks) {
    for (UserId u = 0; u < n_users; ++u) {
      pooled_user[u].Merge(b.pooled_user[u]);
      batch_user[u].Merge(b.batch_user[u]);
    }
    for (ClassId c = 0; c < n_classes; ++c) est.latest_per_class[c].Merge(b.per_class[c]);
    pooled.Merge(b.pooled);
    est.latest_size.Merge(b.latest);
    est.first_half.Merge(b.first_half);
    est.second_half.Merge(b.second_half);
    est.bookkeeping.arrivals += b.book.arrivals;
    est.bookkeeping.consumed += b.book.consumed;
    est.bookkeeping.expired_unseen += b.book.expired_unseen;
    est.bookkeeping.pending_at_end += b.book.pending_at_end;
    if (req.visit_csv != nullptr) *req.visit_csv << b.csv;
    if (req.ratios_out != nullptr) {
      req.ratios_out->insert(req.ratios_out->end(), b.ratios.begin(), b.ratios.end());
    }
  }
  std::vector<UserRatio> users;
  users.reserve(n_users);
  for (UserId u = 0; u < n_users; ++u) {
    // Batch means carry the between-trial dependence; with a single trial
    // fall back to the per-visit spread.
    double hw = batch_user[u].count() >= 2 ? batch_user[u].half_width()
                                           : pooled_user[u].half_width();
    users.push_back({u, pooled_user[u].count(), pooled_user[u].mean(), hw});
  }
  est.ratio = SummarizeUsers(std::move(users), req.trials, pooled);
  return est;
}

}  // namespace ocf
