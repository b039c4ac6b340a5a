#include "secrl/timed.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "secrl/error.hpp"

namespace secrl {

TimedMdp::TimedMdp(std::shared_ptr<const ProductMdp> product, std::uint32_t layers)
    : product_(std::move(product)), layers_(layers) {
  if (layers_ == 0) throw ConfigError("timed MDP needs at least one layer");
}

void TimedMdp::outcomes(const TimedState& q, Action a, std::vector<TimedOutcome>& out) const {
  out.clear();
  thread_local std::vector<ProductOutcome> scratch;
  product_->outcomes(q.product, a, scratch);
  const std::uint32_t n2 = std::min(q.layer + 1, layers_ - 1);
  for (const auto& o : scratch) out.push_back({{o.target, n2}, o.probability, o.reward, o.weakest});
}

std::vector<TimedState> TimedMdp::explore(std::size_t limit) const {
  std::vector<TimedState> order;
  absl::flat_hash_map<std::uint64_t, std::uint32_t> seen;
  order.push_back(initial());
  seen.emplace(key(initial()), 0);
  std::vector<TimedOutcome> outs;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const TimedState q = order[k];
    for (Action a : kActions) {
      outcomes(q, a, outs);
      for (const auto& o : outs) {
        if (seen.emplace(key(o.target), static_cast<std::uint32_t>(order.size())).second) {
          order.push_back(o.target);
          if (order.size() > limit) throw ConfigError("timed MDP exploration exceeded " + std::to_string(limit) + " states");
        }
      }
    }
  }
  return order;
}

std::shared_ptr<const TimedMdp> build_timed(std::shared_ptr<const ProductMdp> product, std::uint32_t layers) {
  return std::make_shared<const TimedMdp>(std::move(product), layers);
}

// ---- distances

struct DistanceMap::Memo {
  absl::flat_hash_map<std::uint64_t, std::uint32_t> dist;
};

DistanceMap::DistanceMap(std::shared_ptr<const TimedMdp> timed, double eps)
    : timed_(std::move(timed)), eps_(eps), memo_(std::make_unique<Memo>()) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
}
DistanceMap::~DistanceMap() = default;
DistanceMap::DistanceMap(DistanceMap&&) noexcept = default;
DistanceMap& DistanceMap::operator=(DistanceMap&&) noexcept = default;

std::size_t DistanceMap::memo_size() const { return memo_->dist.size(); }

std::uint32_t DistanceMap::operator()(const TimedState& q) const {
  const auto& t = *timed_;
  if (t.accepting(q)) return 0;
  if (t.product().dead(q.product) || t.final_layer(q)) return kInfiniteDistance;
  const std::uint64_t k = t.key(q);
  if (auto it = memo_->dist.find(k); it != memo_->dist.end()) return it->second;
  std::uint32_t best = kInfiniteDistance;
  for (Action a : kActions) best = std::min(best, via(q, a));
  const std::uint32_t d = best == kInfiniteDistance ? kInfiniteDistance : best + 1;
  memo_->dist.emplace(k, d);
  return d;
}

std::uint32_t DistanceMap::via(const TimedState& q, Action a) const {
  std::vector<TimedOutcome> outs;
  timed_->outcomes(q, a, outs);
  std::uint32_t best = kInfiniteDistance;
  for (const auto& o : outs) {
    if (eps_edge(o.weakest, eps_)) best = std::min(best, (*this)(o.target));
  }
  return best;
}

DistanceMap distance_map(std::shared_ptr<const TimedMdp> timed, double eps) { return DistanceMap(std::move(timed), eps); }

Action reach_policy(const DistanceMap& dist, const TimedState& q, std::uint8_t allowed) {
  std::uint32_t best = kInfiniteDistance;
  Action pick = Action::Stay;
  for (Action a : kActions) {
    if (!((allowed >> static_cast<unsigned>(a)) & 1u)) continue;
    const std::uint32_t d = dist.via(q, a);
    if (d < best) {
      best = d;
      pick = a;
    }
  }
  if (best == kInfiniteDistance) throw NoFeasibleAction("no action reaches an accepting state from this state");
  return pick;
}

double satisfaction_bound(std::uint32_t i, std::uint32_t d, double eps) {
  if (d == kInfiniteDistance || d > i) return 0.0;
  if (eps <= 0.0) return 1.0;
  const std::uint32_t u = (i - d) / 2;
  // terms of the binomial pmf, built up from j = 0
  double term = std::pow(1.0 - eps, static_cast<double>(i));
  const double ratio = eps / (1.0 - eps);
  double sum = term;
  for (std::uint32_t j = 0; j < u && j < i; ++j) {
    term *= static_cast<double>(i - j) / static_cast<double>(j + 1) * ratio;
    sum += term;
  }
  return std::min(sum, 1.0);
}

// ---- pruning

namespace {

class Pruner {
 public:
  Pruner(const DistanceMap& dist, double p_th) : dist_(dist), t_(dist.timed()), p_th_(p_th) {}

  // bit per action kept at q; 0 on accepting and final-layer states
  std::uint8_t mask(const TimedState& q) {
    if (t_.accepting(q) || t_.final_layer(q)) return 0;
    const std::uint64_t k = t_.key(q);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    std::uint8_t m = 0;
    std::vector<TimedOutcome> outs;
    const std::uint32_t i = t_.layers() - q.layer - 1;
    for (Action a : kActions) {
      t_.outcomes(q, a, outs);
      if (keep(q, i, outs)) m |= std::uint8_t(1u << static_cast<unsigned>(a));
      else ++removed_;
    }
    memo_.emplace(k, m);
    return m;
  }

  double bound(const TimedState& q, Action a) {
    std::vector<TimedOutcome> outs;
    t_.outcomes(q, a, outs);
    return satisfaction_bound(t_.layers() - q.layer - 1, dist_max(outs), dist_.eps());
  }

  std::size_t explored() const { return memo_.size(); }
  std::uint64_t removed() const { return removed_; }

 private:
  std::uint32_t dist_max(const std::vector<TimedOutcome>& outs) {
    std::uint32_t dm = 0;
    for (const auto& o : outs) dm = std::max(dm, dist_(o.target));
    return dm;
  }

  bool keep(const TimedState& q, std::uint32_t i, const std::vector<TimedOutcome>& outs) {
    (void)q;
    const std::uint32_t dm = dist_max(outs);
    if (dm == kInfiniteDistance || dm > i) return false;
    if (satisfaction_bound(i, dm, dist_.eps()) < p_th_) return false;
    // a likely successor left without actions would strand the episode.
    // Checking every successor instead turns this into a game against
    // worst-case slips, which no time-bounded mission survives.
    for (const auto& o : outs) {
      if (!eps_edge(o.weakest, dist_.eps()) || t_.accepting(o.target)) continue;
      if (t_.final_layer(o.target)) return false;
      if (mask(o.target) == 0) return false;
    }
    return true;
  }

  const DistanceMap& dist_;
  const TimedMdp& t_;
  double p_th_;
  absl::flat_hash_map<std::uint64_t, std::uint8_t> memo_;
  std::uint64_t removed_ = 0;
};

}  // namespace

PrunedTimedMdp prune(const DistanceMap& dist, double p_th) {
  if (!(p_th > 0.0 && p_th <= 1.0)) throw ConfigError("p_th must lie in (0, 1]");
  const TimedMdp& t = dist.timed();
  Pruner pr(dist, p_th);

  PrunedTimedMdp out;
  out.eps = dist.eps();
  out.p_th = p_th;

  const TimedState q0 = t.initial();
  if (!t.accepting(q0) && pr.mask(q0) == 0) {
    double best = 0.0;
    if (!t.final_layer(q0))
      for (Action a : kActions) best = std::max(best, pr.bound(q0, a));
    throw Infeasible("initial state keeps no feasible action (best bound " + std::to_string(best) + ")", best);
  }

  absl::flat_hash_map<std::uint64_t, std::uint32_t> index;
  auto intern = [&](const TimedState& q) {
    auto [it, fresh] = index.emplace(t.key(q), static_cast<std::uint32_t>(out.states.size()));
    if (fresh) out.states.push_back(q);
    return it->second;
  };
  intern(q0);
  std::vector<TimedOutcome> outs;
  out.offsets.push_back(0);
  for (std::size_t k = 0; k < out.states.size(); ++k) {
    const TimedState q = out.states[k];
    const std::uint8_t m = pr.mask(q);
    out.feasible.push_back(m);
    out.dist.push_back(dist(q));
    out.accepting.push_back(t.accepting(q) ? 1 : 0);
    for (Action a : kActions) {
      if ((m >> static_cast<unsigned>(a)) & 1u) {
        t.outcomes(q, a, outs);
        for (const auto& o : outs) {
          const std::uint32_t target = intern(o.target);
          out.targets.push_back(target);
        }
      }
      out.offsets.push_back(static_cast<std::uint32_t>(out.targets.size()));
    }
  }
  out.timed = dist.timed_ptr();
  out.explored = pr.explored();
  out.removed_actions = pr.removed();
  return out;
}

void PrunedTimedMdp::outcomes(std::uint32_t q, Action a, std::vector<PrunedOutcome>& out) const {
  out.clear();
  const auto succ = successors(q, a);
  if (succ.empty()) return;
  thread_local std::vector<TimedOutcome> scratch;
  timed->outcomes(states[q], a, scratch);
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    const auto& o = scratch[k];
    out.push_back({succ[k], o.probability, o.reward, eps_edge(o.weakest, eps)});
  }
}

std::vector<double> PrunedTimedMdp::satisfaction_probability(const std::vector<std::uint8_t>* policy) const {
  // targets sit one layer up except on the frozen final layer, which is terminal
  std::vector<std::uint32_t> order(size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return states[a].layer > states[b].layer; });
  std::vector<double> v(size(), 0.0);
  std::vector<PrunedOutcome> outs;
  for (auto q : order) {
    if (accepting[q]) {
      v[q] = 1.0;
      continue;
    }
    if (terminal(q)) continue;
    double best = 0.0;
    for (Action a : kActions) {
      if (!allowed(q, a)) continue;
      if (policy && (*policy)[q] != static_cast<std::uint8_t>(a)) continue;
      outcomes(q, a, outs);
      double s = 0.0;
      for (const auto& o : outs) s += o.probability * v[o.target];
      best = std::max(best, s);
    }
    v[q] = best;
  }
  return v;
}

std::string PrunedTimedMdp::explain() const {
  std::ostringstream os;
  const std::uint32_t L = layers();
  const auto& p = timed->product();
  os << "composed states   " << p.mdp().size() << "\n";
  os << "dfa states        " << p.dfa().size() << "\n";
  os << "layers            " << L << "\n";
  os << "nominal states    " << timed->nominal_size() << "\n";
  os << "explored states   " << explored << "\n";
  os << "pruned states     " << size() << "\n";
  os << "transitions       " << transition_count() << "\n";
  os << "removed actions   " << removed_actions << "\n";
  os << "eps " << eps << "  p_th " << p_th << "\n";
  os << "initial distance  ";
  if (dist[0] == kInfiniteDistance) os << "inf\n";
  else os << dist[0] << " (bound " << satisfaction_bound(L - 1, dist[0], eps) << ")\n";

  os << "best satisfaction probability " << satisfaction_probability()[0] << "\n";

  std::vector<std::size_t> per_layer(L, 0), acc(L, 0), stuck(L, 0), feas(L, 0);
  std::array<std::size_t, kNumActions + 1> hist{};
  for (std::size_t q = 0; q < size(); ++q) {
    const auto n = states[q].layer;
    ++per_layer[n];
    if (accepting[q]) ++acc[n];
    const int c = std::popcount(feasible[q]);
    feas[n] += static_cast<std::size_t>(c);
    if (!accepting[q]) {
      ++hist[static_cast<std::size_t>(c)];
      if (c == 0 && n + 1 < L) ++stuck[n];
    }
  }
  os << "feasible actions per non-accepting state:";
  for (std::size_t c = 0; c <= kNumActions; ++c) os << " " << c << ":" << hist[c];
  os << "\nlayer states accepting stuck feasible_actions\n";
  for (std::uint32_t n = 0; n < L; ++n) {
    if (per_layer[n] == 0) continue;
    os << n << " " << per_layer[n] << " " << acc[n] << " " << stuck[n] << " " << feas[n] << "\n";
  }
  return os.str();
}

}  // namespace secrl
