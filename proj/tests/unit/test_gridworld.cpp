#include <gtest/gtest.h>

#include <map>

#include "secrl/error.hpp"
#include "secrl/grid_mdp.hpp"
#include "secrl/layout.hpp"

using namespace secrl;

namespace {

// 5x1 corridor, every cell special
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

std::map<std::uint32_t, double> dist(std::span<const Outcome> os) {
  std::map<std::uint32_t, double> m;
  for (const auto& o : os) m[o.target] += o.probability;
  return m;
}

}  // namespace

TEST(Grid, DefaultLayoutShape) {
  const GridMdp g = build_grid(default_layout());
  EXPECT_EQ(g.size(), 64u);
  EXPECT_EQ(kNumActions, 5u);
  int initial = 0;
  const Event I = grid_propositions().bit("I");
  for (Event e : g.labels()) initial += (e & I) ? 1 : 0;
  EXPECT_EQ(initial, 1);
  EXPECT_EQ(g.label(g.initial()) & I, I);
}

TEST(Grid, ZeroEpsIsDeterministic) {
  const GridMdp g = build_grid(default_layout(), 0.0);
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    for (Action a : kActions) {
      const auto os = g.outcomes(s, a);
      ASSERT_EQ(os.size(), 1u);
      EXPECT_DOUBLE_EQ(os[0].probability, 1.0);
    }
  }
}

TEST(Grid, NorthFromTopRowRedirectsToStay) {
  const GridMdp g = build_grid(default_layout(), 0.05);
  const std::uint32_t s = g.index({3, 0});
  const auto d = dist(g.outcomes(s, Action::North));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d.at(s), 0.95, 1e-12);
  EXPECT_NEAR(d.at(g.index({2, 0})), 0.025, 1e-12);
  EXPECT_NEAR(d.at(g.index({4, 0})), 0.025, 1e-12);
}

TEST(Grid, InteriorSlipSplit) {
  const GridMdp g = build_grid(default_layout(), 0.2);
  const std::uint32_t s = g.index({4, 4});
  const auto d = dist(g.outcomes(s, Action::East));
  EXPECT_NEAR(d.at(g.index({5, 4})), 0.8, 1e-12);
  EXPECT_NEAR(d.at(g.index({4, 3})), 0.1, 1e-12);
  EXPECT_NEAR(d.at(g.index({4, 5})), 0.1, 1e-12);
}

TEST(Grid, StayIsPointMass) {
  const GridMdp g = build_grid(default_layout(), 0.3);
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    const auto os = g.outcomes(s, Action::Stay);
    ASSERT_EQ(os.size(), 1u);
    EXPECT_EQ(os[0].target, s);
  }
}

TEST(Grid, DistributionsSumToOne) {
  const GridMdp g = build_grid(random_layout(9, 4), 0.13);
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    for (Action a : kActions) {
      double sum = 0.0;
      for (const auto& o : g.outcomes(s, a)) sum += o.probability;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Grid, RejectsBadEps) {
  EXPECT_THROW(build_grid(default_layout(), 1.0), LayoutError);
  EXPECT_THROW(build_grid(default_layout(), -0.1), LayoutError);
}

TEST(Grid, RejectsOverlapAndOutside) {
  MissionLayout l = corridor();
  l.pickup1 = {{0, 0}};
  EXPECT_THROW(build_grid(l), LayoutError);
  l = corridor();
  l.delivery2 = {{5, 0}};
  EXPECT_THROW(build_grid(l), LayoutError);
  l = corridor();
  l.bounds = {5, 4, 20, 21, 35};
  EXPECT_THROW(build_grid(l), LayoutError);
}

TEST(Grid, Rewards) {
  MissionLayout l = default_layout();
  l.rewards = {{4, 4}};
  l.obstacles = {{2, 4}};
  const GridMdp g = build_grid(l, 0.0);
  const auto& rc = l.reward;
  EXPECT_DOUBLE_EQ(g.outcomes(g.index({3, 4}), Action::East)[0].reward, rc.step + rc.reward_cell);
  EXPECT_DOUBLE_EQ(g.outcomes(g.index({3, 4}), Action::West)[0].reward, rc.step + rc.obstacle);
  EXPECT_DOUBLE_EQ(g.outcomes(g.index({3, 4}), Action::North)[0].reward, rc.step);
  // sitting on a reward cell pays nothing extra
  EXPECT_DOUBLE_EQ(g.outcomes(g.index({4, 4}), Action::Stay)[0].reward, rc.step);
}

TEST(Grid, JsonRoundTrip) {
  const MissionLayout l = random_layout(12, 7);
  EXPECT_EQ(layout_from_json(layout_to_json(l)), l);
  EXPECT_THROW(layout_from_json("{\"width\": 3"), Error);
}

TEST(Grid, RandomLayoutIsSeeded) {
  EXPECT_EQ(random_layout(10, 3), random_layout(10, 3));
  EXPECT_NE(random_layout(10, 3), random_layout(10, 4));
}

TEST(Compose, WidthOneIsBase) {
  auto g = std::make_shared<const GridMdp>(build_grid(default_layout(), 0.1));
  const ComposedMdp c = self_compose(g, 1);
  ASSERT_EQ(c.size(), g->size());
  std::vector<Outcome> out;
  for (std::uint32_t s = 0; s < g->size(); ++s) {
    EXPECT_EQ(c.label(s), std::vector<Event>{g->label(s)});
    for (Action a : kActions) {
      c.outcomes(s, a, out);
      const auto d = dist(g->outcomes(s, a));
      ASSERT_EQ(out.size(), d.size());
      for (const auto& o : out) EXPECT_NEAR(o.probability, d.at(o.target), 1e-15);
    }
  }
}

TEST(Compose, SquareSize) {
  auto g = std::make_shared<const GridMdp>(build_grid(default_layout()));
  EXPECT_EQ(self_compose(g, 2).size(), 64u * 64u);
}

TEST(Compose, ProductOfCoordinates) {
  // East from cell 0 of the corridor: 0.9 right, 0.1 stays
  auto g = std::make_shared<const GridMdp>(build_grid(corridor(), 0.1));
  const ComposedMdp c = self_compose(g, 2);

  // explicit 2-state rows and their Kronecker product
  const double P[2][2] = {{0.1, 0.9}, {0.0, 1.0}};
  double K[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) K[i][j] = P[i % 2][j % 2] * P[i / 2][j / 2];

  std::vector<Outcome> out;
  const std::uint32_t s00 = c.compose(std::vector<std::uint32_t>{0, 0});
  c.outcomes(s00, Action::East, out);
  std::map<std::uint32_t, double> got;
  for (const auto& o : out) got[o.target] += o.probability;
  for (int j = 0; j < 4; ++j) {
    const std::uint32_t t = c.compose(std::vector<std::uint32_t>{std::uint32_t(j % 2), std::uint32_t(j / 2)});
    const double p = got.count(t) ? got[t] : 0.0;
    EXPECT_NEAR(p, K[0][j], 1e-12) << j;
  }
  EXPECT_NEAR(got[c.compose(std::vector<std::uint32_t>{0, 1})], 0.09, 1e-12);
}

TEST(Compose, RewardsAddAndWeakestIsMin) {
  MissionLayout l = corridor();
  l.width = 6;
  l.rewards = {{5, 0}};
  auto g = std::make_shared<const GridMdp>(build_grid(l, 0.1));
  const ComposedMdp c = self_compose(g, 2);
  std::vector<Outcome> out;
  const std::uint32_t s = c.compose(std::vector<std::uint32_t>{4, 0});
  c.outcomes(s, Action::East, out);
  for (const auto& o : out) {
    const std::uint32_t a = c.coordinate(o.target, 0), b = c.coordinate(o.target, 1);
    double r = 0.0, w = 1.0;
    for (const auto& [src, dst] : {std::pair<std::uint32_t, std::uint32_t>{4, a}, {0, b}}) {
      for (const auto& x : g->outcomes(src, Action::East)) {
        if (x.target == dst) {
          r += x.reward;
          w = std::min(w, x.probability);
        }
      }
    }
    EXPECT_DOUBLE_EQ(o.reward, r);
    EXPECT_DOUBLE_EQ(o.weakest, w);
  }
}

TEST(Compose, LabelsAreTuples) {
  auto g = std::make_shared<const GridMdp>(build_grid(corridor()));
  const ComposedMdp c = self_compose(g, 2);
  const std::uint32_t s = c.compose(std::vector<std::uint32_t>{1, 3});
  const auto lab = c.label(s);
  ASSERT_EQ(lab.size(), 2u);
  EXPECT_EQ(lab[0], grid_propositions().bit("p1"));
  EXPECT_EQ(lab[1], grid_propositions().bit("d1"));
  const TupleAlphabet alpha = grid_alphabet(*g, 2);
  EXPECT_EQ(alpha.coordinate(c.symbol(s, alpha), 1), lab[1]);
}

TEST(Compose, KripkeSupport) {
  const GridMdp g = build_grid(corridor(), 0.0);
  const KripkeStructure k = to_kripke(g);
  EXPECT_EQ(k.size(), 5u);
  EXPECT_EQ(k.successors(0), (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(k.successors(2), (std::vector<std::uint32_t>{1, 2, 3}));
}
