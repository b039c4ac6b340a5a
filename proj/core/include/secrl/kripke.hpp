#ifndef SECRL_KRIPKE_HPP
#define SECRL_KRIPKE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "secrl/alphabet.hpp"
#include "secrl/automaton.hpp"

namespace secrl {

struct KripkeTransition {
  std::uint32_t from;
  std::uint32_t duration;
  std::uint32_t to;
};

/// Timed Kripke structure. Every state needs an outgoing transition.
class KripkeStructure {
 public:
  KripkeStructure(std::vector<Event> labels, std::vector<std::uint32_t> initial,
                  std::vector<KripkeTransition> transitions);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<Event>& labels() const noexcept { return labels_; }
  const std::vector<std::uint32_t>& initial() const noexcept { return initial_; }
  const std::vector<KripkeTransition>& transitions() const noexcept { return transitions_; }
  std::vector<std::uint32_t> successors(std::uint32_t s) const;

 private:
  std::vector<Event> labels_;
  std::vector<std::uint32_t> initial_;
  std::vector<KripkeTransition> transitions_;
};

/// D x K. State (x, k) has id x * |K| + k. A step from (x, k) reads the label
/// of k and follows any Kripke edge (k, d, k'), so successors are not
/// unique; this is why the product is not a Dfa.
struct KripkeProduct {
  std::size_t dfa_states = 0;
  std::size_t kripke_states = 0;
  std::vector<std::uint32_t> initial;
  std::vector<bool> accepting;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> successors;  // (target, duration)

  std::size_t size() const noexcept { return accepting.size(); }
  std::uint32_t id(StateId x, std::uint32_t k) const { return static_cast<std::uint32_t>(x * kripke_states + k); }
};

/// Throws WidthError unless the DFA has width 1 and LabelMismatch when a
/// Kripke label is not an alphabet event.
KripkeProduct kripke_product(const Dfa& d, const KripkeStructure& k);

/// Fewest steps from some initial product state to an accepting one.
std::optional<std::size_t> steps_to_accept(const KripkeProduct& p);

/// Same, starting from one given product state.
std::optional<std::size_t> steps_to_accept(const KripkeProduct& p, std::uint32_t from);

}  // namespace secrl

#endif  // SECRL_KRIPKE_HPP
