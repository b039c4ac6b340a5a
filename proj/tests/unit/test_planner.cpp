#include <gtest/gtest.h>

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <deque>
#include <functional>
#include <random>

#include "secrl/compile.hpp"
#include "secrl/error.hpp"
#include "secrl/grid_mdp.hpp"
#include "secrl/monitor.hpp"
#include "secrl/product.hpp"
#include "secrl/timed.hpp"

using namespace secrl;

namespace {

struct Pipe {
  FormulaAst f;
  std::shared_ptr<const GridMdp> grid;
  std::shared_ptr<const ComposedMdp> mdp;
  std::shared_ptr<const Dfa> dfa;
  std::shared_ptr<const ProductMdp> product;
  std::shared_ptr<const TimedMdp> timed;
};

Pipe make(const MissionLayout& l, double eps, const std::string& formula, std::size_t m = 1, std::uint32_t layers = 0) {
  Pipe p;
  p.f = parse(formula);
  p.grid = std::make_shared<const GridMdp>(build_grid(l, eps));
  p.mdp = std::make_shared<const ComposedMdp>(self_compose(p.grid, m));
  p.dfa = std::make_shared<const Dfa>(quantifier_eliminate(p.f, grid_alphabet(*p.grid, m)));
  p.product = build_product(p.mdp, p.dfa);
  if (layers == 0) layers = static_cast<std::uint32_t>(deadline(p.f)) + 2;
  p.timed = build_timed(p.product, layers);
  return p;
}

MissionLayout corridor() {
  MissionLayout l;
  l.width = 5;
  l.height = 1;
  l.initial = {{0, 0}};
  l.pickup1 = {{1, 0}};
  l.pickup2 = {{2, 0}};
  l.delivery1 = {{3, 0}};
  l.delivery2 = {{4, 0}};
  return l;
}

// 4x3, twelve cells
MissionLayout small() {
  MissionLayout l;
  l.width = 4;
  l.height = 3;
  l.initial = {{0, 0}};
  l.pickup1 = {{3, 0}};
  l.pickup2 = {{0, 2}};
  l.delivery1 = {{3, 2}};
  l.delivery2 = {{1, 1}};
  return l;
}

// d1 in the corner of an open 3x3
MissionLayout three() {
  MissionLayout l;
  l.width = 3;
  l.height = 3;
  l.initial = {{2, 2}};
  l.pickup1 = {{1, 2}};
  l.pickup2 = {{2, 0}};
  l.delivery1 = {{0, 0}};
  l.delivery2 = {{0, 2}};
  return l;
}

TimedState at(const Pipe& p, std::uint32_t s, std::uint32_t layer) { return {{s, p.dfa->initial()}, layer}; }

double binom_cdf(std::uint32_t i, std::uint32_t k, double eps) {
  boost::math::binomial_distribution<double> b(i, eps);
  return boost::math::cdf(b, k);
}

}  // namespace

// --- product

TEST(Product, Size) {
  const Pipe p = make(small(), 0.1, "forall p . [H^1 p1@p]^[0,8]");
  EXPECT_EQ(p.product->size(), 12u * p.dfa->size());
}

TEST(Product, WidthMismatch) {
  const Pipe p = make(small(), 0.1, "forall p . [H^1 p1@p]^[0,8]");
  auto two = std::make_shared<const ComposedMdp>(self_compose(p.grid, 2));
  EXPECT_THROW(build_product(two, p.dfa), AlphabetMismatch);
}

TEST(Product, CorridorMatchesPathEnumeration) {
  // from cell 3 heading East; d2 is cell 4
  const Pipe p = make(corridor(), 0.1, "forall p . [H^0 d2@p]^[0,2]");
  const auto bound = bind_formula(*p.f.body, p.f.variables(), grid_propositions());

  // grid side: every path of 3 cells under East, monitor on its labels
  double direct = 0.0;
  std::function<void(std::uint32_t, double, std::vector<Event>)> walk = [&](std::uint32_t s, double pr,
                                                                              std::vector<Event> lab) {
    lab.push_back(p.grid->label(s));
    if (lab.size() == 3) {
      if (evaluate_events(bound, {lab})) direct += pr;
      return;
    }
    for (const auto& o : p.grid->outcomes(s, Action::East)) walk(o.target, pr * o.probability, lab);
  };
  walk(3, 1.0, {});

  // product side: probability of having hit acceptance after 3 steps
  double chain = 0.0;
  std::vector<ProductOutcome> out;
  std::function<void(ProductState, double, int)> run = [&](ProductState q, double pr, int k) {
    if (p.product->accepting(q)) {
      chain += pr;
      return;
    }
    if (k == 3) return;
    std::vector<ProductOutcome> local;
    p.product->outcomes(q, Action::East, local);
    for (const auto& o : local) run(o.target, pr * o.probability, k + 1);
  };
  run({3, p.dfa->initial()}, 1.0, 0);

  EXPECT_NEAR(direct, chain, 1e-12);
  // 0.9 of moving, then the d2 symbol is read on the following step
  EXPECT_NEAR(chain, 0.9 + 0.1 * 0.9, 1e-12);

  // deterministic: exactly step 2
  const Pipe d = make(corridor(), 0.0, "forall p . [H^0 d2@p]^[0,2]");
  ProductState q{3, d.dfa->initial()};
  for (int k = 1; k <= 2; ++k) {
    d.product->outcomes(q, Action::East, out);
    ASSERT_EQ(out.size(), 1u);
    q = out[0].target;
    EXPECT_EQ(d.product->accepting(q), k == 2);
  }
}

TEST(Product, RowsSumToOne) {
  const Pipe p = make(small(), 0.2, "forall p1 . forall p2 . [H^1 p1@p1 & H^0 !p1@p2]^[0,4]", 2);
  std::vector<ProductOutcome> out;
  for (std::uint32_t s = 0; s < p.mdp->size(); s += 7) {
    for (StateId x = 0; x < p.dfa->size(); ++x) {
      for (Action a : kActions) {
        p.product->outcomes({s, x}, a, out);
        double sum = 0.0;
        for (const auto& o : out) sum += o.probability;
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(Product, MonteCarloAgreesWithMonitor) {
  const Pipe p = make(small(), 0.1, "forall p . [H^1 p1@p]^[0,8]");
  const auto bound = bind_formula(*p.f.body, p.f.variables(), grid_propositions());
  const std::size_t len = deadline(p.f) + 1;
  const int n = 100000;

  std::mt19937_64 ra(11), rb(11);
  std::uniform_int_distribution<int> pick(0, 4);
  int sat_m = 0, sat_p = 0;
  std::vector<ProductOutcome> out;
  for (int e = 0; e < n; ++e) {
    // grid rollout, monitor verdict
    std::uint32_t s = p.grid->initial();
    std::vector<Event> lab{p.grid->label(s)};
    while (lab.size() < len) {
      const auto os = p.grid->outcomes(s, kActions[pick(ra)]);
      s = os[sample_outcome(os, ra)].target;
      lab.push_back(p.grid->label(s));
    }
    sat_m += evaluate_events(bound, {lab}) ? 1 : 0;

    // product rollout, accepting hit
    ProductState q = p.product->initial();
    bool hit = false;
    for (std::size_t k = 0; k < len && !hit; ++k) {
      p.product->outcomes(q, kActions[pick(rb)], out);
      q = out[sample_outcome(std::span<const ProductOutcome>(out), rb)].target;
      hit = p.product->accepting(q);
    }
    sat_p += hit ? 1 : 0;
  }
  const double a = double(sat_m) / n, b = double(sat_p) / n;
  const double se = std::sqrt(a * (1 - a) / n + b * (1 - b) / n);
  EXPECT_GT(a, 0.01);
  EXPECT_LE(std::abs(a - b), 3 * se + 1e-12) << a << " vs " << b;
}

// --- timed

TEST(Timed, SingleLayerIsFrozen) {
  const Pipe p = make(small(), 0.1, "forall p . [H^1 p1@p]^[0,8]", 1, 1);
  std::vector<TimedOutcome> out;
  for (std::uint32_t s = 0; s < 12; ++s) {
    for (Action a : kActions) {
      p.timed->outcomes(at(p, s, 0), a, out);
      for (const auto& o : out) EXPECT_EQ(o.target.layer, 0u);
    }
  }
}

TEST(Timed, LayersNeverDecrease) {
  const Pipe p = make(small(), 0.1, "forall p . [H^1 p1@p]^[0,8]");
  const std::uint32_t L = p.timed->layers();
  std::vector<TimedOutcome> out;
  for (std::uint32_t n = 0; n < L; ++n) {
    for (std::uint32_t s = 0; s < 12; ++s) {
      p.timed->outcomes(at(p, s, n), Action::East, out);
      for (const auto& o : out) EXPECT_EQ(o.target.layer, std::min(n + 1, L - 1));
    }
  }
}

TEST(Timed, StateCount) {
  const Pipe p = make(default_layout(), 0.05, "forall p . [H^1 d1@p]^[0,30]", 1, 36);
  EXPECT_EQ(p.timed->nominal_size(), std::uint64_t(64) * p.dfa->size() * 36);
  // the arithmetic quoted for a 20-state automaton
  EXPECT_EQ(64 * 20 * 36, 46080);
}

// --- distances

TEST(Distance, AcceptingIsZero) {
  const Pipe p = make(corridor(), 0.0, "forall p . [H^0 d2@p]^[0,10]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  std::vector<TimedOutcome> out;
  p.timed->outcomes(at(p, 4, 0), Action::Stay, out);
  ASSERT_TRUE(p.timed->accepting(out[0].target));
  EXPECT_EQ(d(out[0].target), 0u);
}

TEST(Distance, DeterministicChain) {
  const Pipe p = make(corridor(), 0.0, "forall p . [H^0 d2@p]^[0,10]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  // reading d2 takes one step after arriving on it
  for (std::uint32_t s = 0; s < 5; ++s) EXPECT_EQ(d(at(p, s, 0)), 5 - s) << s;
}

TEST(Distance, WeakEdgeExcluded) {
  // intended move has 0.94 < 1 - 0.05; only Stay stays eps-probabilistic
  const Pipe p = make(corridor(), 0.06, "forall p . [H^0 d2@p]^[0,10]");
  EXPECT_EQ(distance_map(p.timed, 0.05)(at(p, 0, 0)), kInfiniteDistance);
  EXPECT_EQ(distance_map(p.timed, 0.06)(at(p, 0, 0)), 5u);
}

TEST(Distance, TriangleStep) {
  const Pipe p = make(small(), 0.1, "forall p . [H^1 p1@p]^[0,8]");
  const DistanceMap d = distance_map(p.timed, 0.1);
  std::vector<TimedOutcome> out;
  for (std::uint32_t s = 0; s < 12; ++s) {
    const TimedState q = at(p, s, 0);
    const std::uint32_t dq = d(q);
    if (dq == 0 || dq == kInfiniteDistance) continue;
    for (Action a : kActions) {
      p.timed->outcomes(q, a, out);
      for (const auto& o : out) {
        if (eps_edge(o.weakest, 0.1) && d(o.target) != kInfiniteDistance) EXPECT_LE(dq, 1 + d(o.target));
      }
    }
  }
}

// --- reach policy

TEST(Reach, AdjacentStepsIn) {
  const Pipe p = make(corridor(), 0.05, "forall p . [H^0 d2@p]^[0,10]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  EXPECT_EQ(reach_policy(d, at(p, 3, 0)), Action::East);
}

TEST(Reach, TieGoesNorth) {
  const Pipe p = make(three(), 0.05, "forall p . [H^0 d1@p]^[0,12]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  // centre: North and West both one cell from the corner
  EXPECT_EQ(reach_policy(d, at(p, 4, 0)), Action::North);
}

TEST(Reach, DescentMatchesBfs) {
  const Pipe p = make(three(), 0.05, "forall p . [H^0 d1@p]^[0,12]");
  const DistanceMap d = distance_map(p.timed, 0.05);

  // plain BFS on the 4-neighbour grid from the corner
  std::vector<int> bfs(9, -1);
  std::deque<int> qu{0};
  bfs[0] = 0;
  while (!qu.empty()) {
    const int c = qu.front();
    qu.pop_front();
    const int x = c % 3, y = c / 3;
    const int nb[4][2] = {{x, y - 1}, {x + 1, y}, {x - 1, y}, {x, y + 1}};
    for (auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[0] > 2 || n[1] > 2) continue;
      const int k = n[1] * 3 + n[0];
      if (bfs[k] < 0) {
        bfs[k] = bfs[c] + 1;
        qu.push_back(k);
      }
    }
  }

  std::vector<TimedOutcome> out;
  for (std::uint32_t s = 0; s < 9; ++s) {
    TimedState q = at(p, s, 0);
    EXPECT_EQ(d(q), std::uint32_t(bfs[s] + 1)) << s;
    int steps = 0;
    while (!p.timed->accepting(q) && steps < 20) {
      p.timed->outcomes(q, reach_policy(d, q), out);
      const auto it = std::max_element(out.begin(), out.end(),
                                       [](const auto& a, const auto& b) { return a.probability < b.probability; });
      q = it->target;
      ++steps;
    }
    EXPECT_EQ(steps, bfs[s] + 1) << s;
  }
}

TEST(Reach, NoFeasibleAction) {
  const Pipe p = make(corridor(), 0.05, "forall p . [H^0 d2@p]^[0,2]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  EXPECT_THROW(reach_policy(d, at(p, 0, 0)), NoFeasibleAction);
}

// --- bound

TEST(Bound, Golden) {
  // sum_{j<=3} C(10,j) 0.05^j 0.95^(10-j)
  EXPECT_NEAR(satisfaction_bound(10, 4, 0.05), 0.998971502062109, 1e-14);
}

TEST(Bound, EdgeCases) {
  EXPECT_DOUBLE_EQ(satisfaction_bound(7, 3, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(satisfaction_bound(3, 3, 0.0), 1.0);
  EXPECT_NEAR(satisfaction_bound(6, 6, 0.1), std::pow(0.9, 6), 1e-15);
  EXPECT_DOUBLE_EQ(satisfaction_bound(3, 5, 0.05), 0.0);
  EXPECT_DOUBLE_EQ(satisfaction_bound(3, kInfiniteDistance, 0.05), 0.0);
  EXPECT_NEAR(satisfaction_bound(0, 0, 0.3), 1.0, 1e-15);
}

TEST(Bound, MatchesBinomialCdf) {
  for (std::uint32_t i : {1u, 4u, 9u, 20u, 63u, 150u}) {
    for (std::uint32_t d = 0; d <= i; d += 1 + i / 7) {
      for (double eps : {0.01, 0.05, 0.2, 0.5}) {
        EXPECT_NEAR(satisfaction_bound(i, d, eps), binom_cdf(i, (i - d) / 2, eps), 1e-12) << i << " " << d << " " << eps;
      }
    }
  }
}

TEST(Bound, Monotone) {
  for (std::uint32_t i = 0; i <= 40; ++i) {
    for (std::uint32_t d = 0; d <= i; ++d) {
      for (double eps = 0.0; eps < 0.5; eps += 0.05) {
        const double v = satisfaction_bound(i, d, eps);
        EXPECT_GE(v + 1e-12, satisfaction_bound(i, d, eps + 0.05));
        EXPECT_GE(v + 1e-12, satisfaction_bound(i, d + 1, eps));
        // one more step only helps once it buys another allowed slip
        if (d >= 1) EXPECT_LE(v, satisfaction_bound(i + 2, d, eps) + 1e-12);
      }
    }
  }
}

TEST(Bound, OneExtraStepCanLower) {
  // same slip budget over one more trial
  EXPECT_GT(satisfaction_bound(4, 2, 0.05), satisfaction_bound(5, 2, 0.05));
  EXPECT_NEAR(satisfaction_bound(5, 2, 0.05), binom_cdf(5, 1, 0.05), 1e-14);
}

// --- prune

TEST(Prune, GenerousHorizonKeepsEarlyActions) {
  const Pipe p = make(corridor(), 0.05, "forall p . [H^0 d2@p]^[0,40]");
  const PrunedTimedMdp m = prune(distance_map(p.timed, 0.05), 0.85);
  for (std::uint32_t q = 0; q < m.size(); ++q) {
    if (m.states[q].layer <= 5 && !m.accepting[q]) EXPECT_EQ(m.feasible[q], 0x1f) << q;
  }
}

TEST(Prune, TooLittleTimeIsInfeasible) {
  // five steps needed, three layers to go
  const Pipe p = make(corridor(), 0.05, "forall p . [H^0 d2@p]^[0,2]");
  EXPECT_THROW(prune(distance_map(p.timed, 0.05), 0.85), Infeasible);
}

TEST(Prune, RiskyBranch) {
  // cell 3 on layer 3 has i = 4 steps left. East: worst successor is a slip
  // in place, distance 2. West: worst is cell 2, distance 3.
  const Pipe p = make(corridor(), 0.05, "forall p . [H^0 d2@p]^[0,6]");
  ASSERT_EQ(p.timed->layers(), 8u);
  const DistanceMap d = distance_map(p.timed, 0.05);
  const PrunedTimedMdp m = prune(d, 0.85);

  const double keep = binom_cdf(4, (4 - 2) / 2, 0.05);
  const double risky = binom_cdf(4, (4 - 3) / 2, 0.05);
  EXPECT_NEAR(keep, 0.98598125, 1e-12);
  EXPECT_NEAR(risky, 0.81450625, 1e-12);
  ASSERT_GE(keep, 0.85);
  ASSERT_LT(risky, 0.85);

  bool found = false;
  for (std::uint32_t q = 0; q < m.size(); ++q) {
    if (m.states[q].product.s != 3 || m.states[q].layer != 3) continue;
    found = true;
    EXPECT_TRUE(m.allowed(q, Action::East));
    EXPECT_FALSE(m.allowed(q, Action::West));
  }
  EXPECT_TRUE(found);
}

TEST(Prune, RejectsBadThreshold) {
  const Pipe p = make(corridor(), 0.05, "forall p . [H^0 d2@p]^[0,6]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  EXPECT_THROW(prune(d, 0.0), ConfigError);
  EXPECT_THROW(prune(d, 1.5), ConfigError);
}

TEST(Prune, IntendedPathsReachAcceptance) {
  for (const char* f : {"forall p . [H^1 d1@p]^[0,9]", "forall p . [H^0 p1@p]^[0,6] ; [H^0 d1@p]^[0,8]"}) {
    const Pipe p = make(small(), 0.05, f);
    ASSERT_LE(p.timed->nominal_size(), 10000u);
    const PrunedTimedMdp m = prune(distance_map(p.timed, 0.05), 0.85);

    std::vector<std::int8_t> ok(m.size(), -1);
    std::vector<PrunedOutcome> out;
    std::function<bool(std::uint32_t)> safe = [&](std::uint32_t q) -> bool {
      if (ok[q] >= 0) return ok[q];
      bool r;
      if (m.accepting[q]) {
        r = true;
      } else if (m.feasible[q] == 0 || m.states[q].layer + 1 == m.layers()) {
        r = false;
      } else {
        r = true;
        for (Action a : kActions) {
          if (!m.allowed(q, a)) continue;
          std::vector<PrunedOutcome> local;
          m.outcomes(q, a, local);
          for (const auto& o : local) {
            if (o.eps_edge && !safe(o.target)) r = false;
          }
        }
      }
      ok[q] = r;
      return r;
    };
    EXPECT_TRUE(safe(0)) << f;
  }
}

TEST(Prune, PolicyValueMatchesRollouts) {
  const Pipe p = make(small(), 0.05, "forall p . [H^1 d1@p]^[0,9]");
  const DistanceMap d = distance_map(p.timed, 0.05);
  const PrunedTimedMdp m = prune(d, 0.85);
  std::vector<std::uint8_t> pol(m.size(), 0);
  for (std::uint32_t q = 0; q < m.size(); ++q) {
    if (!m.terminal(q)) pol[q] = static_cast<std::uint8_t>(reach_policy(d, m.states[q], m.feasible[q]));
  }
  const double v = m.satisfaction_probability(&pol)[0];
  EXPECT_LE(v, m.satisfaction_probability()[0] + 1e-12);

  std::mt19937_64 rng(5);
  const int n = 20000;
  int hit = 0;
  std::vector<PrunedOutcome> out;
  for (int e = 0; e < n; ++e) {
    std::uint32_t q = 0;
    while (!m.terminal(q)) {
      m.outcomes(q, static_cast<Action>(pol[q]), out);
      q = out[sample_outcome(std::span<const PrunedOutcome>(out), rng)].target;
    }
    hit += m.accepting[q];
  }
  const double f = double(hit) / n;
  EXPECT_NEAR(f, v, 3 * std::sqrt(v * (1 - v) / n) + 1e-9);
}
