#ifndef SECRL_LEARNER_HPP
#define SECRL_LEARNER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secrl/formula.hpp"
#include "secrl/timed.hpp"

namespace secrl {

enum class Algorithm { SoftmaxEps, QLearning, DynaQ };

const char* algorithm_name(Algorithm a);  // "softmax_eps", "q_learning", "dyna_q"
Algorithm parse_algorithm(std::string_view s);  // ConfigError on anything else

struct LearnerConfig {
  double p_th = 0.85;
  double motion_eps = 0.05;
  double explore_eps = 0.1;
  double temperature = 1.0;
  double temperature_decay = 1.0;  // sigma multiplier per episode; 1 keeps it fixed
  double min_temperature = 0.01;
  double learning_rate = 0.1;
  double gamma = 0.95;
  std::uint64_t episodes = 50000;
  std::uint32_t planning_steps = 5;  // Dyna-Q only
  double q_init = 0.0;
  std::uint64_t seed = 1;
  bool wall_clock = false;           // fill EpisodeRecord::wall_ms
  std::uint32_t monitor_every = 100;  // re-check satisfaction with the monitor every n-th episode, 0 = never

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

using Rng = std::mt19937_64;

/// Independent stream `stream` for a run seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Action values over the pruned states, 5 per state. Entries of infeasible
/// actions stay at the initial value and are never read.
class QTable {
 public:
  QTable() = default;
  QTable(const PrunedTimedMdp& model, double init);

  std::size_t states() const noexcept { return values_.size() / kNumActions; }
  double operator()(std::uint32_t q, Action a) const { return values_[index(q, a)]; }
  double& at(std::uint32_t q, Action a) { return values_[index(q, a)]; }
  std::span<const double, kNumActions> row(std::uint32_t q) const {
    return std::span<const double, kNumActions>(values_.data() + std::size_t(q) * kNumActions, kNumActions);
  }
  std::uint8_t feasible(std::uint32_t q) const { return feasible_[q]; }
  bool terminal(std::uint32_t q) const { return terminal_[q]; }

  /// max over feasible actions; 0 on terminal states.
  double max_value(std::uint32_t q) const;
  /// argmax over feasible actions, ties to the earlier action. Throws
  /// EmptyFeasibleSet.
  Action greedy(std::uint32_t q) const;

 private:
  static std::size_t index(std::uint32_t q, Action a) { return std::size_t(q) * kNumActions + static_cast<std::size_t>(a); }
  std::vector<double> values_;
  std::vector<std::uint8_t> feasible_;
  std::vector<std::uint8_t> terminal_;
};

/// Boltzmann distribution exp(Q / sigma) over the feasible actions, zero
/// elsewhere.
std::array<double, kNumActions> softmax_probabilities(std::span<const double, kNumActions> q, std::uint8_t feasible,
                                                      double sigma);

/// Softmax-eps rule: draw alpha; greedy when alpha > explore_eps, Boltzmann
/// sample otherwise.
Action select_action(std::span<const double, kNumActions> q, std::uint8_t feasible, double explore_eps, double sigma,
                     Rng& rng);
/// Plain eps-greedy: uniform over feasible actions when alpha <= explore_eps.
Action select_epsilon_greedy(std::span<const double, kNumActions> q, std::uint8_t feasible, double explore_eps,
                             Rng& rng);

/// One TD(0) step; returns the new value of Q(q, a).
double q_update(QTable& table, std::uint32_t q, Action a, double reward, std::uint32_t next, double learning_rate,
                double gamma);

struct EpisodeRecord {
  std::uint64_t episode;  // 1-based
  double reward;
  bool satisfied;
  double wall_ms;  // cumulative, 0 unless timing was requested
};

struct RunResult {
  Algorithm algorithm = Algorithm::SoftmaxEps;
  LearnerConfig config;
  QTable table;
  std::vector<EpisodeRecord> records;
  std::uint64_t steps = 0;
  std::uint64_t experience = 0;        // transitions logged
  std::uint64_t monitor_checks = 0;
  std::uint64_t monitor_mismatches = 0;
  std::uint64_t feasibility_violations = 0;  // must stay 0

  /// Greedy action per pruned state, kNumActions on terminal states.
  std::vector<std::uint8_t> policy() const;
  double satisfied_fraction(std::size_t last_n) const;
};

/// Optional per-step callback for audits: (state, action, reward, next).
using StepObserver = std::function<void(std::uint32_t, Action, double, std::uint32_t)>;

RunResult train(const PrunedTimedMdp& model, const FormulaAst& formula, Algorithm algorithm, const LearnerConfig& cfg,
                const StepObserver& observer = {});
RunResult train_softmax_eps(const PrunedTimedMdp& model, const FormulaAst& formula, const LearnerConfig& cfg);
RunResult train_q_learning(const PrunedTimedMdp& model, const FormulaAst& formula, const LearnerConfig& cfg);
RunResult train_dyna_q(const PrunedTimedMdp& model, const FormulaAst& formula, const LearnerConfig& cfg);

/// Result of running a fixed policy on the pruned model.
struct PolicyStats {
  std::uint64_t episodes = 0;
  std::uint64_t satisfied = 0;         // automaton verdict
  std::uint64_t monitor_satisfied = 0;  // monitor verdict on the padded traces
  std::uint64_t stuck = 0;             // ended in a state without feasible actions
  double mean_reward = 0.0;
};

/// `policy(q)` must return a feasible action of pruned state q.
PolicyStats evaluate_policy(const PrunedTimedMdp& model, const FormulaAst& formula,
                            const std::function<Action(std::uint32_t)>& policy, std::uint64_t episodes,
                            std::uint64_t seed);

/// Traces of one episode, one per coordinate, as events of the grid.
std::vector<std::vector<Event>> episode_traces(const PrunedTimedMdp& model, std::span<const std::uint32_t> path);

/// Monitor verdict on an episode path, padded with its last label to the
/// formula's deadline + 1 positions.
bool monitor_verdict(const PrunedTimedMdp& model, const FormulaAst& formula, std::span<const std::uint32_t> path);

/// CSV with header episode,reward,satisfied,cum_wall_ms.
std::string records_csv(const std::vector<EpisodeRecord>& records, bool with_wall);

}  // namespace secrl

#endif  // SECRL_LEARNER_HPP
