#ifndef SECRL_GRID_MDP_HPP
#define SECRL_GRID_MDP_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "secrl/alphabet.hpp"
#include "secrl/kripke.hpp"
#include "secrl/layout.hpp"

namespace secrl {

/// Declaration order is also the tie-break order.
enum class Action : std::uint8_t { North, East, West, South, Stay };
inline constexpr std::size_t kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kActions{Action::North, Action::East, Action::West, Action::South,
                                                          Action::Stay};
const char* action_name(Action a);

struct Outcome {
  std::uint32_t target;
  double probability;
  double reward;
  /// Smallest coordinate probability that produced this outcome; equal to
  /// `probability` for a single grid.
  double weakest;
};

/// Proposition table shared by every grid: I p1 p2 d1 d2 O B R.
const Propositions& grid_propositions();

class GridMdp {
 public:
  GridMdp(MissionLayout layout, double motion_eps);

  const MissionLayout& layout() const noexcept { return layout_; }
  int width() const noexcept { return layout_.width; }
  int height() const noexcept { return layout_.height; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint32_t initial() const noexcept { return initial_; }
  double motion_eps() const noexcept { return eps_; }
  double gamma() const noexcept { return layout_.gamma; }

  std::uint32_t index(Cell c) const { return static_cast<std::uint32_t>(c.y * layout_.width + c.x); }
  Cell cell(std::uint32_t s) const { return {static_cast<int>(s) % layout_.width, static_cast<int>(s) / layout_.width}; }

  Event label(std::uint32_t s) const { return labels_[s]; }
  const std::vector<Event>& labels() const noexcept { return labels_; }

  std::span<const Outcome> outcomes(std::uint32_t s, Action a) const {
    const std::size_t k = s * kNumActions + static_cast<std::size_t>(a);
    return {outcomes_.data() + offsets_[k], outcomes_.data() + offsets_[k + 1]};
  }

  /// Distinct labels in order of first appearance by state index.
  std::vector<Event> distinct_labels() const;

 private:
  MissionLayout layout_;
  double eps_;
  std::uint32_t initial_ = 0;
  std::vector<Event> labels_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Outcome> outcomes_;
};

/// Throws LayoutError for an invalid layout or motion_eps outside [0, 1).
GridMdp build_grid(const MissionLayout& layout, double motion_eps);
inline GridMdp build_grid(const MissionLayout& layout) { return build_grid(layout, layout.motion_eps); }

/// m copies of a grid driven by one shared action. State index is
/// sum_c s_c * N^c; transitions multiply, rewards add, labels are tuples.
class ComposedMdp {
 public:
  ComposedMdp(std::shared_ptr<const GridMdp> base, std::size_t m);

  const GridMdp& base() const noexcept { return *base_; }
  std::size_t width() const noexcept { return m_; }
  std::size_t size() const noexcept { return size_; }
  std::uint32_t initial() const noexcept { return initial_; }

  std::uint32_t coordinate(std::uint32_t s, std::size_t c) const;
  std::uint32_t compose(std::span<const std::uint32_t> coords) const;
  std::vector<Event> label(std::uint32_t s) const;

  /// Writes the successor distribution into `out` (cleared first).
  void outcomes(std::uint32_t s, Action a, std::vector<Outcome>& out) const;

  /// Label tuple as a symbol of `alphabet` (throws LabelMismatch).
  std::size_t symbol(std::uint32_t s, const TupleAlphabet& alphabet) const;

 private:
  std::shared_ptr<const GridMdp> base_;
  std::size_t m_;
  std::size_t size_;
  std::uint32_t initial_;
};

ComposedMdp self_compose(std::shared_ptr<const GridMdp> base, std::size_t m);

/// Support graph of the grid: (s, 1, s') whenever some action can move s to s'.
KripkeStructure to_kripke(const GridMdp& g);

/// Tuple alphabet over the grid's distinct labels.
TupleAlphabet grid_alphabet(const GridMdp& g, std::size_t width);

}  // namespace secrl

#endif  // SECRL_GRID_MDP_HPP
