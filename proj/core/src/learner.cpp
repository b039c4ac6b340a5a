#include "secrl/learner.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <chrono>
#include <bit>
#include <cmath>
#include <sstream>

#include "secrl/error.hpp"
#include "secrl/monitor.hpp"

namespace secrl {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::SoftmaxEps: return "softmax_eps";
    case Algorithm::QLearning: return "q_learning";
    case Algorithm::DynaQ: return "dyna_q";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "softmax_eps" || s == "softmax") return Algorithm::SoftmaxEps;
  if (s == "q_learning" || s == "ql") return Algorithm::QLearning;
  if (s == "dyna_q" || s == "dq") return Algorithm::DynaQ;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

void LearnerConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(p_th > 0.0 && p_th <= 1.0)) throw ConfigError("p_th must lie in (0, 1]");
  if (!(motion_eps >= 0.0 && motion_eps < 1.0)) throw ConfigError("motion_eps must lie in [0, 1)");
  if (!unit(explore_eps)) throw ConfigError("explore_eps must lie in [0, 1]");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (!(temperature_decay > 0.0 && temperature_decay <= 1.0)) throw ConfigError("temperature_decay must lie in (0, 1]");
  if (!(min_temperature > 0.0)) throw ConfigError("min_temperature must be positive");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must lie in (0, 1]");
  if (!unit(gamma)) throw ConfigError("gamma must lie in [0, 1]");
  if (episodes == 0) throw ConfigError("episodes must be positive");
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5ec41u};
  return Rng(seq);
}

// ---- Q table

QTable::QTable(const PrunedTimedMdp& model, double init)
    : values_(model.size() * kNumActions, init), feasible_(model.feasible), terminal_(model.size()) {
  for (std::uint32_t q = 0; q < model.size(); ++q) terminal_[q] = model.terminal(q) ? 1 : 0;
}

double QTable::max_value(std::uint32_t q) const {
  if (terminal_[q]) return 0.0;
  double best = -INFINITY;
  for (Action a : kActions)
    if ((feasible_[q] >> static_cast<unsigned>(a)) & 1u) best = std::max(best, (*this)(q, a));
  return best;
}

namespace {

Action argmax(std::span<const double, kNumActions> q, std::uint8_t feasible) {
  int pick = -1;
  for (std::size_t k = 0; k < kNumActions; ++k) {
    if (!((feasible >> k) & 1u)) continue;
    if (pick < 0 || q[k] > q[static_cast<std::size_t>(pick)]) pick = static_cast<int>(k);
  }
  if (pick < 0) throw EmptyFeasibleSet("no feasible action to choose from");
  return static_cast<Action>(pick);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

Action QTable::greedy(std::uint32_t q) const { return argmax(row(q), feasible_[q]); }

std::array<double, kNumActions> softmax_probabilities(std::span<const double, kNumActions> q, std::uint8_t feasible,
                                                      double sigma) {
  std::array<double, kNumActions> p{};
  double top = -INFINITY;
  for (std::size_t k = 0; k < kNumActions; ++k)
    if ((feasible >> k) & 1u) top = std::max(top, q[k]);
  if (top == -INFINITY) throw EmptyFeasibleSet("no feasible action to choose from");
  double z = 0.0;
  for (std::size_t k = 0; k < kNumActions; ++k) {
    if ((feasible >> k) & 1u) {
      p[k] = std::exp((q[k] - top) / sigma);
      z += p[k];
    }
  }
  for (auto& v : p) v /= z;
  return p;
}

Action select_action(std::span<const double, kNumActions> q, std::uint8_t feasible, double explore_eps, double sigma,
                     Rng& rng) {
  if (feasible == 0) throw EmptyFeasibleSet("no feasible action to choose from");
  const double alpha = uniform01(rng);
  if (alpha > explore_eps) return argmax(q, feasible);
  const auto p = softmax_probabilities(q, feasible, sigma);
  double u = uniform01(rng);
  int last = 0;
  for (std::size_t k = 0; k < kNumActions; ++k) {
    if (!((feasible >> k) & 1u)) continue;
    last = static_cast<int>(k);
    u -= p[k];
    if (u < 0.0) return static_cast<Action>(k);
  }
  return static_cast<Action>(last);
}

Action select_epsilon_greedy(std::span<const double, kNumActions> q, std::uint8_t feasible, double explore_eps,
                             Rng& rng) {
  if (feasible == 0) throw EmptyFeasibleSet("no feasible action to choose from");
  const double alpha = uniform01(rng);
  if (alpha > explore_eps) return argmax(q, feasible);
  const int n = std::popcount(feasible);
  int pick = std::uniform_int_distribution<int>(0, n - 1)(rng);
  for (std::size_t k = 0; k < kNumActions; ++k) {
    if (((feasible >> k) & 1u) && pick-- == 0) return static_cast<Action>(k);
  }
  return Action::Stay;  // unreachable
}

double q_update(QTable& table, std::uint32_t q, Action a, double reward, std::uint32_t next, double learning_rate,
                double gamma) {
  double& v = table.at(q, a);
  v += learning_rate * (reward + gamma * table.max_value(next) - v);
  return v;
}

// ---- episodes

std::vector<std::uint8_t> RunResult::policy() const {
  std::vector<std::uint8_t> out(table.states(), static_cast<std::uint8_t>(kNumActions));
  for (std::uint32_t q = 0; q < table.states(); ++q)
    if (!table.terminal(q)) out[q] = static_cast<std::uint8_t>(table.greedy(q));
  return out;
}

double RunResult::satisfied_fraction(std::size_t last_n) const {
  const std::size_t n = std::min(last_n, records.size());
  if (n == 0) return 0.0;
  std::size_t hit = 0;
  for (std::size_t k = records.size() - n; k < records.size(); ++k) hit += records[k].satisfied ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(n);
}

std::vector<std::vector<Event>> episode_traces(const PrunedTimedMdp& model, std::span<const std::uint32_t> path) {
  const auto& mdp = model.timed->product().mdp();
  std::vector<std::vector<Event>> traces(mdp.width());
  for (auto q : path) {
    const auto labels = mdp.label(model.states[q].product.s);
    for (std::size_t c = 0; c < labels.size(); ++c) traces[c].push_back(labels[c]);
  }
  return traces;
}

namespace {

struct MonitorCache {
  BoundFormula bound;
  std::size_t needed;
};

MonitorCache bind_mission(const FormulaAst& formula) {
  MonitorCache m{bind_formula(*formula.body, formula.variables(), grid_propositions()), 0};
  m.needed = m.bound.deadline() + 1;
  return m;
}

bool padded_verdict(const MonitorCache& m, std::vector<std::vector<Event>> traces) {
  for (auto& t : traces)
    while (t.size() < m.needed) t.push_back(t.back());
  return evaluate_events(m.bound, traces);
}

// Environment and agent randomness are kept apart so that runs differing
// only in the selection rule see the same transitions for the same choices.
enum Stream : std::uint64_t { kEnv = 1, kPolicy = 2, kPlanning = 3 };

}  // namespace

bool monitor_verdict(const PrunedTimedMdp& model, const FormulaAst& formula, std::span<const std::uint32_t> path) {
  return padded_verdict(bind_mission(formula), episode_traces(model, path));
}

RunResult train(const PrunedTimedMdp& model, const FormulaAst& formula, Algorithm algorithm, const LearnerConfig& cfg,
                const StepObserver& observer) {
  cfg.validate();
  if (model.size() == 0) throw Infeasible("empty pruned model", 0.0);
  RunResult run;
  run.algorithm = algorithm;
  run.config = cfg;
  run.table = QTable(model, cfg.q_init);
  run.records.reserve(cfg.episodes);
  QTable& Q = run.table;

  Rng env = make_rng(cfg.seed, kEnv);
  Rng pol = make_rng(cfg.seed, kPolicy);
  Rng plan = make_rng(cfg.seed, kPlanning);
  const MonitorCache mon = bind_mission(formula);

  // Dyna-Q model: last observed (next, reward) per visited pair
  struct Seen {
    std::uint32_t next;
    double reward;
  };
  absl::flat_hash_map<std::uint64_t, Seen> seen;
  std::vector<std::uint64_t> visited;
  const bool dyna = algorithm == Algorithm::DynaQ;

  std::vector<PrunedOutcome> outs;
  std::vector<std::uint32_t> path;
  double sigma = cfg.temperature;
  const auto t0 = std::chrono::steady_clock::now();

  for (std::uint64_t ep = 1; ep <= cfg.episodes; ++ep) {
    std::uint32_t q = 0;
    double total = 0.0;
    path.clear();
    path.push_back(q);
    while (!Q.terminal(q)) {
      const std::uint8_t m = Q.feasible(q);
      const Action a = algorithm == Algorithm::SoftmaxEps ? select_action(Q.row(q), m, cfg.explore_eps, sigma, pol)
                                                          : select_epsilon_greedy(Q.row(q), m, cfg.explore_eps, pol);
      if (!model.allowed(q, a)) ++run.feasibility_violations;
      model.outcomes(q, a, outs);
      const auto& o = outs[sample_outcome(std::span<const PrunedOutcome>(outs), env)];
      q_update(Q, q, a, o.reward, o.target, cfg.learning_rate, cfg.gamma);
      if (observer) observer(q, a, o.reward, o.target);
      ++run.experience;
      if (dyna) {
        const std::uint64_t key = std::uint64_t(q) * kNumActions + static_cast<std::uint64_t>(a);
        auto [it, fresh] = seen.try_emplace(key, Seen{o.target, o.reward});
        if (fresh) visited.push_back(key);
        else it->second = {o.target, o.reward};
        for (std::uint32_t k = 0; k < cfg.planning_steps; ++k) {
          const std::uint64_t pick = visited[std::uniform_int_distribution<std::size_t>(0, visited.size() - 1)(plan)];
          const Seen& s = seen.at(pick);
          q_update(Q, static_cast<std::uint32_t>(pick / kNumActions), static_cast<Action>(pick % kNumActions),
                   s.reward, s.next, cfg.learning_rate, cfg.gamma);
        }
      }
      total += o.reward;
      q = o.target;
      path.push_back(q);
      ++run.steps;
    }
    const bool sat = model.accepting[q] != 0;
    const bool full = model.states[q].layer + 1 == model.layers();
    if (cfg.monitor_every > 0 && ep % cfg.monitor_every == 0 && (sat || full)) {
      ++run.monitor_checks;
      if (padded_verdict(mon, episode_traces(model, path)) != sat) ++run.monitor_mismatches;
    }
    double ms = 0.0;
    if (cfg.wall_clock) ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    run.records.push_back({ep, total, sat, ms});
    sigma = std::max(cfg.min_temperature, sigma * cfg.temperature_decay);
  }
  return run;
}

RunResult train_softmax_eps(const PrunedTimedMdp& model, const FormulaAst& formula, const LearnerConfig& cfg) {
  return train(model, formula, Algorithm::SoftmaxEps, cfg);
}
RunResult train_q_learning(const PrunedTimedMdp& model, const FormulaAst& formula, const LearnerConfig& cfg) {
  return train(model, formula, Algorithm::QLearning, cfg);
}
RunResult train_dyna_q(const PrunedTimedMdp& model, const FormulaAst& formula, const LearnerConfig& cfg) {
  return train(model, formula, Algorithm::DynaQ, cfg);
}

PolicyStats evaluate_policy(const PrunedTimedMdp& model, const FormulaAst& formula,
                            const std::function<Action(std::uint32_t)>& policy, std::uint64_t episodes,
                            std::uint64_t seed) {
  PolicyStats st;
  Rng env = make_rng(seed, kEnv);
  const MonitorCache mon = bind_mission(formula);
  std::vector<PrunedOutcome> outs;
  std::vector<std::uint32_t> path;
  double sum = 0.0;
  for (std::uint64_t ep = 0; ep < episodes; ++ep) {
    std::uint32_t q = 0;
    path.assign(1, q);
    double total = 0.0;
    while (!model.terminal(q)) {
      const Action a = policy(q);
      if (!model.allowed(q, a)) throw NoFeasibleAction("policy chose an infeasible action");
      model.outcomes(q, a, outs);
      const auto& o = outs[sample_outcome(std::span<const PrunedOutcome>(outs), env)];
      total += o.reward;
      q = o.target;
      path.push_back(q);
    }
    ++st.episodes;
    sum += total;
    if (model.accepting[q]) ++st.satisfied;
    else if (model.feasible[q] == 0 && model.states[q].layer + 1 < model.layers()) ++st.stuck;
    if (padded_verdict(mon, episode_traces(model, path))) ++st.monitor_satisfied;
  }
  st.mean_reward = episodes ? sum / static_cast<double>(episodes) : 0.0;
  return st;
}

std::string records_csv(const std::vector<EpisodeRecord>& records, bool with_wall) {
  std::ostringstream os;
  os.precision(17);
  os << "episode,reward,satisfied,cum_wall_ms\n";
  for (const auto& r : records) {
    os << r.episode << ',' << r.reward << ',' << (r.satisfied ? 1 : 0) << ',';
    if (with_wall) os << r.wall_ms;
    os << '\n';
  }
  return os.str();
}

}  // namespace secrl
