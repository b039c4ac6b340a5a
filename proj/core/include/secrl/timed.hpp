#ifndef SECRL_TIMED_HPP
#define SECRL_TIMED_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "secrl/product.hpp"

namespace secrl {

struct TimedState {
  ProductState product;
  std::uint32_t layer;

  bool operator==(const TimedState&) const = default;
};

struct TimedOutcome {
  TimedState target;
  double probability;
  double reward;
  double weakest;
};

/// Product MDP unrolled over `layers` time steps 0..layers-1. The layer
/// advances by one per step and stays at layers-1 once there. Nothing is
/// stored; successors are computed on demand.
class TimedMdp {
 public:
  TimedMdp(std::shared_ptr<const ProductMdp> product, std::uint32_t layers);

  const ProductMdp& product() const noexcept { return *product_; }
  std::shared_ptr<const ProductMdp> product_ptr() const noexcept { return product_; }
  std::uint32_t layers() const noexcept { return layers_; }
  TimedState initial() const noexcept { return {product_->initial(), 0}; }

  /// |S| * |X| * layers
  std::uint64_t nominal_size() const noexcept { return product_->size() * layers_; }
  std::uint64_t key(const TimedState& q) const noexcept { return product_->id(q.product) * layers_ + q.layer; }

  bool accepting(const TimedState& q) const { return product_->accepting(q.product); }
  bool final_layer(const TimedState& q) const noexcept { return q.layer + 1 == layers_; }

  void outcomes(const TimedState& q, Action a, std::vector<TimedOutcome>& out) const;

  /// Every state reachable from the initial one under any action, in BFS
  /// order. Only for small instances.
  std::vector<TimedState> explore(std::size_t limit = 2'000'000) const;

 private:
  std::shared_ptr<const ProductMdp> product_;
  std::uint32_t layers_;
};

std::shared_ptr<const TimedMdp> build_timed(std::shared_ptr<const ProductMdp> product, std::uint32_t layers);

/// Edge counts as an eps-probabilistic transition when every coordinate
/// probability is at least 1 - eps.
inline bool eps_edge(double weakest, double eps) { return weakest >= 1.0 - eps - 1e-12; }

inline constexpr std::uint32_t kInfiniteDistance = std::numeric_limits<std::uint32_t>::max();

/// Shortest number of eps-probabilistic steps to an accepting state.
/// Computed lazily and memoized; 0 on accepting states, infinite on states
/// whose automaton part is dead and on non-accepting final-layer states.
class DistanceMap {
 public:
  DistanceMap(std::shared_ptr<const TimedMdp> timed, double eps);
  ~DistanceMap();
  DistanceMap(DistanceMap&&) noexcept;
  DistanceMap& operator=(DistanceMap&&) noexcept;

  std::uint32_t operator()(const TimedState& q) const;
  /// min over eps-successors of action a (infinite if none).
  std::uint32_t via(const TimedState& q, Action a) const;
  double eps() const noexcept { return eps_; }
  const TimedMdp& timed() const noexcept { return *timed_; }
  std::shared_ptr<const TimedMdp> timed_ptr() const noexcept { return timed_; }
  std::size_t memo_size() const;

 private:
  struct Memo;
  std::shared_ptr<const TimedMdp> timed_;
  double eps_;
  std::unique_ptr<Memo> memo_;
};

DistanceMap distance_map(std::shared_ptr<const TimedMdp> timed, double eps);

/// Action whose best eps-successor is closest to acceptance; ties go to the
/// earlier action in North, East, West, South, Stay. `allowed` restricts the
/// candidates (bit per action). Throws NoFeasibleAction when every
/// candidate leads nowhere.
Action reach_policy(const DistanceMap& dist, const TimedState& q, std::uint8_t allowed = 0x1f);

/// Lower bound on reaching acceptance within i steps from distance d when
/// each step goes astray with probability eps: sum over j <= (i - d) / 2 of
/// C(i, j) eps^j (1 - eps)^(i - j).
double satisfaction_bound(std::uint32_t i, std::uint32_t d, double eps);

struct PrunedOutcome {
  std::uint32_t target;  // index into PrunedTimedMdp::states
  double probability;
  double reward;
  bool eps_edge;
};

/// Explicit timed MDP restricted to the states reachable from the initial
/// state under feasible actions. Index 0 is the initial state. Only target
/// indices are stored; probabilities and rewards come from the timed MDP in
/// the same order.
struct PrunedTimedMdp {
  std::shared_ptr<const TimedMdp> timed;
  double eps = 0.0;
  double p_th = 0.0;
  std::vector<TimedState> states;
  std::vector<std::uint8_t> feasible;  // bit per action
  std::vector<std::uint32_t> dist;
  std::vector<std::uint8_t> accepting;
  std::vector<std::uint32_t> offsets;  // (state * 5 + action) -> target range; empty for infeasible actions
  std::vector<std::uint32_t> targets;
  std::uint64_t explored = 0;  // timed states whose feasibility was decided
  std::uint64_t removed_actions = 0;

  std::size_t size() const noexcept { return states.size(); }
  bool allowed(std::uint32_t q, Action a) const { return (feasible[q] >> static_cast<unsigned>(a)) & 1u; }
  std::span<const std::uint32_t> successors(std::uint32_t q, Action a) const {
    const std::size_t k = std::size_t(q) * kNumActions + static_cast<std::size_t>(a);
    return {targets.data() + offsets[k], targets.data() + offsets[k + 1]};
  }
  /// Successor distribution of a feasible action (cleared first).
  void outcomes(std::uint32_t q, Action a, std::vector<PrunedOutcome>& out) const;
  bool terminal(std::uint32_t q) const {
    return accepting[q] || feasible[q] == 0 || states[q].layer + 1 == timed->layers();
  }
  std::size_t transition_count() const noexcept { return targets.size(); }

  /// Probability of reaching an accepting state from each state, by backward
  /// induction over the layers. Maximised over feasible actions, or under a
  /// fixed policy (one action per state) when given.
  std::vector<double> satisfaction_probability(const std::vector<std::uint8_t>* policy = nullptr) const;
  std::uint32_t layers() const { return timed->layers(); }

  /// Counts per layer, feasible-action histogram and sizes, as text.
  std::string explain() const;
};

/// Removes every action whose worst successor is too far for the remaining
/// time or whose satisfaction_bound is below p_th, plus actions with an
/// eps-successor that is non-accepting and left without actions. Throws
/// Infeasible when the initial state keeps no action.
PrunedTimedMdp prune(const DistanceMap& dist, double p_th);

}  // namespace secrl

#endif  // SECRL_TIMED_HPP
