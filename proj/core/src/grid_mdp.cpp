#include "secrl/grid_mdp.hpp"

#include <algorithm>
#include <set>

#include "secrl/error.hpp"

namespace secrl {

const char* action_name(Action a) {
  switch (a) {
    case Action::North: return "North";
    case Action::East: return "East";
    case Action::West: return "West";
    case Action::South: return "South";
    case Action::Stay: return "Stay";
  }
  return "?";
}

const Propositions& grid_propositions() {
  static const Propositions props({"I", "p1", "p2", "d1", "d2", "O", "B", "R"});
  return props;
}

namespace {

Cell step(Cell c, Action a) {
  switch (a) {
    case Action::North: return {c.x, c.y - 1};
    case Action::East: return {c.x + 1, c.y};
    case Action::West: return {c.x - 1, c.y};
    case Action::South: return {c.x, c.y + 1};
    case Action::Stay: return c;
  }
  return c;
}

// lateral directions of a move
std::array<Action, 2> laterals(Action a) {
  if (a == Action::North || a == Action::South) return {Action::East, Action::West};
  return {Action::North, Action::South};
}

}  // namespace

GridMdp::GridMdp(MissionLayout layout, double motion_eps) : layout_(std::move(layout)), eps_(motion_eps) {
  layout_.validate();
  if (!(motion_eps >= 0.0 && motion_eps < 1.0)) throw LayoutError("motion_eps must lie in [0, 1)");
  const auto& P = grid_propositions();
  const std::size_t n = static_cast<std::size_t>(layout_.width) * layout_.height;
  labels_.assign(n, 0);
  auto mark = [&](const std::vector<Cell>& cells, const char* name) {
    for (auto c : cells) labels_[index(c)] |= P.bit(name);
  };
  mark(layout_.initial, "I");
  mark(layout_.pickup1, "p1");
  mark(layout_.pickup2, "p2");
  mark(layout_.delivery1, "d1");
  mark(layout_.delivery2, "d2");
  mark(layout_.obstacles, "O");
  mark(layout_.observed, "B");
  mark(layout_.rewards, "R");
  initial_ = index(layout_.initial.front());

  const Event obstacle = P.bit("O"), reward = P.bit("R");
  const auto& rc = layout_.reward;
  offsets_.push_back(0);
  std::vector<std::pair<std::uint32_t, double>> dist;
  for (std::uint32_t s = 0; s < n; ++s) {
    const Cell c = cell(s);
    for (Action a : kActions) {
      dist.clear();
      auto add = [&](Action dir, double p) {
        if (p <= 0.0) return;
        Cell t = step(c, dir);
        if (t.x < 0 || t.y < 0 || t.x >= layout_.width || t.y >= layout_.height) t = c;
        const std::uint32_t ti = index(t);
        for (auto& [tgt, q] : dist) {
          if (tgt == ti) {
            q += p;
            return;
          }
        }
        dist.emplace_back(ti, p);
      };
      if (a == Action::Stay) {
        add(Action::Stay, 1.0);
      } else {
        add(a, 1.0 - eps_);
        for (Action l : laterals(a)) add(l, eps_ / 2.0);
      }
      std::sort(dist.begin(), dist.end());
      for (auto [t, p] : dist) {
        double r = rc.step;
        if (t != s && (labels_[t] & reward)) r += rc.reward_cell;
        if (t != s && (labels_[t] & obstacle)) r += rc.obstacle;
        outcomes_.push_back({t, p, r, p});
      }
      offsets_.push_back(static_cast<std::uint32_t>(outcomes_.size()));
    }
  }
}

std::vector<Event> GridMdp::distinct_labels() const {
  std::vector<Event> out;
  for (Event e : labels_) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  return out;
}

GridMdp build_grid(const MissionLayout& layout, double motion_eps) { return GridMdp(layout, motion_eps); }

ComposedMdp::ComposedMdp(std::shared_ptr<const GridMdp> base, std::size_t m) : base_(std::move(base)), m_(m) {
  if (m_ == 0) throw WidthError("self-composition needs m >= 1");
  size_ = 1;
  for (std::size_t c = 0; c < m_; ++c) {
    size_ *= base_->size();
    if (size_ > UINT32_MAX) throw Error("composed state space too large");
  }
  std::vector<std::uint32_t> init(m_, base_->initial());
  initial_ = compose(init);
}

std::uint32_t ComposedMdp::coordinate(std::uint32_t s, std::size_t c) const {
  for (std::size_t k = 0; k < c; ++k) s /= static_cast<std::uint32_t>(base_->size());
  return s % static_cast<std::uint32_t>(base_->size());
}

std::uint32_t ComposedMdp::compose(std::span<const std::uint32_t> coords) const {
  std::uint64_t s = 0, radix = 1;
  for (std::size_t c = 0; c < m_; ++c) {
    s += coords[c] * radix;
    radix *= base_->size();
  }
  return static_cast<std::uint32_t>(s);
}

std::vector<Event> ComposedMdp::label(std::uint32_t s) const {
  std::vector<Event> out(m_);
  const auto n = static_cast<std::uint32_t>(base_->size());
  for (std::size_t c = 0; c < m_; ++c) {
    out[c] = base_->label(s % n);
    s /= n;
  }
  return out;
}

std::size_t ComposedMdp::symbol(std::uint32_t s, const TupleAlphabet& alphabet) const {
  return alphabet.encode(label(s));
}

void ComposedMdp::outcomes(std::uint32_t s, Action a, std::vector<Outcome>& out) const {
  out.clear();
  out.push_back({0, 1.0, 0.0, 1.0});
  const auto n = static_cast<std::uint32_t>(base_->size());
  std::uint32_t radix = 1;
  std::vector<Outcome> next;
  for (std::size_t c = 0; c < m_; ++c) {
    const std::uint32_t sc = s % n;
    s /= n;
    next.clear();
    for (const auto& o : out) {
      for (const auto& b : base_->outcomes(sc, a)) {
        next.push_back({o.target + b.target * radix, o.probability * b.probability, o.reward + b.reward,
                        std::min(o.weakest, b.weakest)});
      }
    }
    out.swap(next);
    radix *= n;
  }
}

ComposedMdp self_compose(std::shared_ptr<const GridMdp> base, std::size_t m) { return ComposedMdp(std::move(base), m); }

KripkeStructure to_kripke(const GridMdp& g) {
  std::vector<KripkeTransition> edges;
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    std::set<std::uint32_t> succ;
    for (Action a : kActions) {
      for (const auto& o : g.outcomes(s, a)) {
        if (o.probability > 0.0) succ.insert(o.target);
      }
    }
    for (auto t : succ) edges.push_back({s, 1, t});
  }
  return KripkeStructure(g.labels(), {g.initial()}, std::move(edges));
}

TupleAlphabet grid_alphabet(const GridMdp& g, std::size_t width) {
  return TupleAlphabet(grid_propositions(), g.distinct_labels(), width);
}

}  // namespace secrl
