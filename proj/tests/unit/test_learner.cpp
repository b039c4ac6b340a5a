#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "pipeline.hpp"
#include "secrl/error.hpp"
#include "secrl/learner.hpp"

using namespace secrl;
using namespace testing_pipeline;

namespace {

constexpr const char* kCorridor = "forall p . [H^0 d2@p]^[0,8]";

LearnerConfig quick(std::uint64_t episodes, std::uint64_t seed = 1) {
  LearnerConfig c;
  c.episodes = episodes;
  c.seed = seed;
  return c;
}

using Row = std::array<double, kNumActions>;
std::span<const double, kNumActions> span_of(const Row& r) { return std::span<const double, kNumActions>(r); }

}  // namespace

// --- selection

TEST(Softmax, TwoActions) {
  const Row q{1.0, 0.0, 0.0, 0.0, 0.0};
  const auto p = softmax_probabilities(span_of(q), 0b00011, 1.0);
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-12);
  EXPECT_NEAR(p[1], 0.2689414213699951, 1e-12);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(p[4], 0.0);
}

TEST(Softmax, EqualIsUniform) {
  const Row q{3.0, 3.0, 3.0, 3.0, 3.0};
  const auto p = softmax_probabilities(span_of(q), 0b10101, 0.7);
  EXPECT_NEAR(p[0], 1.0 / 3, 1e-12);
  EXPECT_NEAR(p[2], 1.0 / 3, 1e-12);
  EXPECT_NEAR(p[4], 1.0 / 3, 1e-12);
  EXPECT_EQ(p[1], 0.0);
}

TEST(Softmax, LargeValuesStayFinite) {
  const Row q{1000.0, 999.0, -1000.0, 5.0, 0.0};
  const auto p = softmax_probabilities(span_of(q), 0x1f, 1.0);
  double s = 0.0;
  for (double x : p) {
    EXPECT_TRUE(std::isfinite(x));
    s += x;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(p[0] / p[1], std::exp(1.0), 1e-9);
}

TEST(Softmax, SumsToOne) {
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 20.0);
  for (int k = 0; k < 500; ++k) {
    Row q;
    for (auto& x : q) x = n(rng);
    const std::uint8_t mask = static_cast<std::uint8_t>(1 + k % 31);
    const auto p = softmax_probabilities(span_of(q), mask, 0.5 + (k % 4));
    double s = 0.0;
    for (double x : p) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Softmax, EmptyMaskThrows) {
  const Row q{};
  EXPECT_THROW(softmax_probabilities(span_of(q), 0, 1.0), EmptyFeasibleSet);
  Rng rng(1);
  EXPECT_THROW(select_action(span_of(q), 0, 0.1, 1.0, rng), EmptyFeasibleSet);
  EXPECT_THROW(select_epsilon_greedy(span_of(q), 0, 0.1, rng), EmptyFeasibleSet);
}

TEST(Select, ZeroExploreIsArgmax) {
  Rng rng(9);
  const Row q{0.5, 2.0, 2.0, -1.0, 1.0};
  for (int k = 0; k < 200; ++k) {
    EXPECT_EQ(select_action(span_of(q), 0x1f, 0.0, 1.0, rng), Action::East);  // tie goes to the earlier
    EXPECT_EQ(select_epsilon_greedy(span_of(q), 0x1f, 0.0, rng), Action::East);
  }
  // infeasible maximum is skipped
  EXPECT_EQ(select_action(span_of(q), 0b10001, 0.0, 1.0, rng), Action::Stay);
}

TEST(Select, SoftmaxBranchFrequencies) {
  // explore_eps = 1 always samples the Boltzmann distribution
  Rng rng(4);
  const Row q{1.0, 0.0, 0.0, 0.0, 0.0};
  const int n = 200000;
  int north = 0;
  for (int k = 0; k < n; ++k) north += select_action(span_of(q), 0b00011, 1.0, 1.0, rng) == Action::North;
  const double p = 0.7310585786300049;
  EXPECT_NEAR(double(north) / n, p, 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Select, EpsilonGreedyExploresUniformly) {
  Rng rng(5);
  const Row q{9.0, 0.0, 0.0, 0.0, 0.0};
  std::array<int, kNumActions> c{};
  const int n = 90000;
  for (int k = 0; k < n; ++k) ++c[static_cast<int>(select_epsilon_greedy(span_of(q), 0b01101, 1.0, rng))];
  EXPECT_EQ(c[1], 0);
  EXPECT_EQ(c[4], 0);
  for (int a : {0, 2, 3}) EXPECT_NEAR(c[a] / double(n), 1.0 / 3, 0.01);
}

// --- update

TEST(Update, OneStepCollapse) {
  const Mission m = build(corridor(), 0.0, kCorridor);
  QTable t(m.model, 0.0);
  EXPECT_DOUBLE_EQ(q_update(t, 0, Action::East, 5.0, 1, 1.0, 0.0), 5.0);
  EXPECT_DOUBLE_EQ(t(0, Action::East), 5.0);
}

TEST(Update, TerminalBootstrapsZero) {
  const Mission m = build(corridor(), 0.0, kCorridor);
  QTable t(m.model, 7.0);
  std::uint32_t acc = 0;
  while (!m.model.accepting[acc]) ++acc;
  EXPECT_DOUBLE_EQ(q_update(t, 0, Action::East, 1.0, acc, 1.0, 0.9), 1.0);
}

TEST(Update, BellmanFixedPoint) {
  const Mission m = build(corridor(), 0.0, kCorridor);
  const double gamma = 0.9;
  const auto v = optimal_values(m.model, gamma);
  QTable t(m.model, 0.0);
  std::vector<PrunedOutcome> out;
  for (std::uint32_t q = 0; q < m.model.size(); ++q) {
    if (m.model.terminal(q)) continue;
    for (Action a : kActions) {
      if (!m.model.allowed(q, a)) continue;
      m.model.outcomes(q, a, out);
      t.at(q, a) = out[0].reward + gamma * (m.model.terminal(out[0].target) ? 0.0 : v[out[0].target]);
    }
  }
  for (std::uint32_t q = 0; q < m.model.size(); ++q) {
    if (m.model.terminal(q)) continue;
    for (Action a : kActions) {
      if (!m.model.allowed(q, a)) continue;
      m.model.outcomes(q, a, out);
      const double before = t(q, a);
      EXPECT_NEAR(q_update(t, q, a, out[0].reward, out[0].target, 0.5, gamma), before, 1e-12);
    }
  }
}

TEST(Update, GeometricSeries) {
  // two states feeding each other with reward 1, gamma 0.5
  const Mission m = build(corridor(), 0.0, kCorridor);
  QTable t(m.model, 0.0);
  int sweeps = 0;
  for (; sweeps < 1000; ++sweeps) {
    q_update(t, 0, Action::East, 1.0, 1, 1.0, 0.5);
    q_update(t, 1, Action::East, 1.0, 0, 1.0, 0.5);
    if (std::abs(t(0, Action::East) - 2.0) < 1e-6 && std::abs(t(1, Action::East) - 2.0) < 1e-6) break;
  }
  EXPECT_LT(sweeps, 1000);
  EXPECT_NEAR(t(0, Action::East), 1.0 / (1.0 - 0.5), 1e-6);
}

// --- training

TEST(Train, CorridorReachesOptimum) {
  const Mission m = build(corridor(), 0.0, kCorridor);
  const double best = optimal_values(m.model, 1.0)[0];
  for (Algorithm alg : {Algorithm::SoftmaxEps, Algorithm::QLearning, Algorithm::DynaQ}) {
    // optimistic start; from zero the greedy walk settles on a detour
    LearnerConfig c = quick(2000);
    c.q_init = 100.0;
    const RunResult r = train(m.model, m.formula, alg, c);
    const double got = rollout_return(m.model, r.policy());
    EXPECT_NEAR(got, best, 0.01 * std::abs(best)) << algorithm_name(alg);
  }
}

TEST(Train, ZeroRewardKeepsInit) {
  MissionLayout l = corridor();
  l.reward = {0.0, 0.0, 0.0, 0.0};
  const Mission m = build(l, 0.0, kCorridor);
  LearnerConfig c = quick(300);
  const RunResult r = train(m.model, m.formula, Algorithm::SoftmaxEps, c);
  for (std::uint32_t q = 0; q < m.model.size(); ++q) {
    if (m.model.terminal(q)) continue;
    for (Action a : kActions) {
      if (!m.model.allowed(q, a)) continue;
      EXPECT_EQ(r.table(q, a), 0.0);
    }
    // greedy falls back to the first feasible action
    const auto pol = r.policy();
    EXPECT_EQ(pol[q], std::countr_zero(static_cast<unsigned>(m.model.feasible[q]))) << q;
  }
}

TEST(Train, SelectionRuleOnlyChangesChoices) {
  // with no exploration both rules are greedy, so the runs coincide
  const Mission m = build(corridor(), 0.1, kCorridor);
  LearnerConfig c = quick(500, 8);
  c.explore_eps = 0.0;
  const RunResult a = train(m.model, m.formula, Algorithm::SoftmaxEps, c);
  const RunResult b = train(m.model, m.formula, Algorithm::QLearning, c);
  EXPECT_EQ(records_csv(a.records, false), records_csv(b.records, false));

  // with exploration the first divergence is at a decision point
  c.explore_eps = 0.3;
  std::vector<std::tuple<std::uint32_t, Action, std::uint32_t>> sa, sb;
  train(m.model, m.formula, Algorithm::SoftmaxEps, c, [&](auto q, auto act, auto, auto nx) { sa.emplace_back(q, act, nx); });
  train(m.model, m.formula, Algorithm::QLearning, c, [&](auto q, auto act, auto, auto nx) { sb.emplace_back(q, act, nx); });
  std::size_t k = 0;
  while (k < sa.size() && k < sb.size() && sa[k] == sb[k]) ++k;
  ASSERT_LT(k, std::min(sa.size(), sb.size()));
  EXPECT_EQ(std::get<0>(sa[k]), std::get<0>(sb[k]));
  EXPECT_NE(std::get<1>(sa[k]), std::get<1>(sb[k]));
}

TEST(Train, DynaWithoutPlanningIsQLearning) {
  const Mission m = build(corridor(6), 0.1, "forall p . [H^1 d2@p]^[0,10]");
  LearnerConfig c = quick(800, 3);
  c.planning_steps = 0;
  const RunResult q = train(m.model, m.formula, Algorithm::QLearning, c);
  const RunResult d = train(m.model, m.formula, Algorithm::DynaQ, c);
  EXPECT_EQ(records_csv(q.records, false), records_csv(d.records, false));
  for (std::uint32_t s = 0; s < m.model.size(); ++s)
    for (Action a : kActions) EXPECT_EQ(q.table(s, a), d.table(s, a));
}

TEST(Train, PlanningLearnsFaster) {
  const Mission m = build(corridor(7), 0.0, "forall p . [H^0 d2@p]^[0,12]");
  const double best = optimal_values(m.model, 1.0)[0];
  auto first_good = [&](std::uint32_t planning, std::uint64_t seed) {
    LearnerConfig c = quick(400, seed);
    c.q_init = 100.0;
    c.planning_steps = planning;
    const RunResult r = train(m.model, m.formula, Algorithm::DynaQ, c);
    for (const auto& e : r.records)
      if (e.reward >= 0.99 * best) return e.episode;
    return std::uint64_t(1000000);
  };
  int wins = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) wins += first_good(5, s) < first_good(0, s) ? 1 : 0;
  EXPECT_GE(wins, 4);
}

TEST(Train, ObservedModelIsInSupport) {
  const Mission m = build(corridor(6), 0.1, "forall p . [H^1 d2@p]^[0,10]");
  std::set<std::tuple<std::uint32_t, int, std::uint32_t>> seen;
  const RunResult r = train(m.model, m.formula, Algorithm::DynaQ, quick(500, 2),
                            [&](std::uint32_t q, Action a, double, std::uint32_t nx) {
                              EXPECT_TRUE(m.model.allowed(q, a));
                              seen.emplace(q, static_cast<int>(a), nx);
                            });
  for (const auto& [q, a, nx] : seen) {
    const auto succ = m.model.successors(q, static_cast<Action>(a));
    EXPECT_NE(std::find(succ.begin(), succ.end(), nx), succ.end());
  }
  EXPECT_EQ(r.feasibility_violations, 0u);
}

TEST(Train, SeedDeterminism) {
  const Mission m = build(corridor(6), 0.1, "forall p . [H^1 d2@p]^[0,10]");
  for (Algorithm alg : {Algorithm::SoftmaxEps, Algorithm::QLearning, Algorithm::DynaQ}) {
    const auto a = train(m.model, m.formula, alg, quick(400, 11));
    const auto b = train(m.model, m.formula, alg, quick(400, 11));
    const auto c = train(m.model, m.formula, alg, quick(400, 12));
    EXPECT_EQ(records_csv(a.records, false), records_csv(b.records, false));
    EXPECT_NE(records_csv(a.records, false), records_csv(c.records, false));
  }
}

TEST(Train, MonitorAgrees) {
  const Mission m = build(corridor(6), 0.1, "forall p . [H^1 d2@p]^[0,10]");
  LearnerConfig c = quick(1000, 4);
  c.monitor_every = 1;
  const RunResult r = train(m.model, m.formula, Algorithm::SoftmaxEps, c);
  // stuck episodes end early and are not checked
  EXPECT_GT(r.monitor_checks, 300u);
  EXPECT_LE(r.monitor_checks, 1000u);
  EXPECT_EQ(r.monitor_mismatches, 0u);
  EXPECT_EQ(r.records.size(), 1000u);
  for (std::size_t k = 0; k < r.records.size(); ++k) EXPECT_EQ(r.records[k].episode, k + 1);
}

TEST(Train, ComposedMissionMonitorAgrees) {
  MissionLayout l;
  l.width = 3;
  l.height = 3;
  l.initial = {{0, 0}};
  l.pickup1 = {{2, 0}};
  l.pickup2 = {{0, 2}};
  l.delivery1 = {{2, 2}};
  l.delivery2 = {{1, 2}};
  l.observed = {{1, 1}, {2, 1}};
  const Mission m = build(l, 0.05, "forall p1 . forall p2 . [H^0 d1@p1 & H^0 d1@p2]^[0,8]", 2);
  LearnerConfig c = quick(500, 6);
  c.monitor_every = 1;
  const RunResult r = train(m.model, m.formula, Algorithm::DynaQ, c);
  EXPECT_EQ(r.monitor_mismatches, 0u);
  EXPECT_GT(r.satisfied_fraction(100), 0.5);
}

// --- config

TEST(Config, Defaults) {
  const LearnerConfig c;
  EXPECT_EQ(c.p_th, 0.85);
  EXPECT_EQ(c.motion_eps, 0.05);
  EXPECT_EQ(c.explore_eps, 0.1);
  EXPECT_EQ(c.temperature, 1.0);
  EXPECT_EQ(c.episodes, 50000u);
}

TEST(Config, Validation) {
  auto bad = [](auto f) {
    LearnerConfig c;
    f(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](LearnerConfig& c) { c.p_th = 0.0; });
  bad([](LearnerConfig& c) { c.explore_eps = 1.5; });
  bad([](LearnerConfig& c) { c.temperature = 0.0; });
  bad([](LearnerConfig& c) { c.learning_rate = 0.0; });
  bad([](LearnerConfig& c) { c.gamma = 1.2; });
  bad([](LearnerConfig& c) { c.episodes = 0; });
  EXPECT_NO_THROW(LearnerConfig{}.validate());
}

TEST(Config, AlgorithmNames) {
  for (Algorithm a : {Algorithm::SoftmaxEps, Algorithm::QLearning, Algorithm::DynaQ})
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  EXPECT_THROW(parse_algorithm("sarsa"), ConfigError);
}

TEST(Records, Csv) {
  std::vector<EpisodeRecord> r{{1, -3.5, false, 1.25}, {2, 97.0, true, 2.5}};
  EXPECT_EQ(records_csv(r, false), "episode,reward,satisfied,cum_wall_ms\n1,-3.5,0,\n2,97,1,\n");
  EXPECT_EQ(records_csv(r, true), "episode,reward,satisfied,cum_wall_ms\n1,-3.5,0,1.25\n2,97,1,2.5\n");
}
