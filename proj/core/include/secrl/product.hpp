#ifndef SECRL_PRODUCT_HPP
#define SECRL_PRODUCT_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "secrl/automaton.hpp"
#include "secrl/grid_mdp.hpp"

namespace secrl {

struct ProductState {
  std::uint32_t s;  // composed MDP state
  StateId x;        // DFA state

  bool operator==(const ProductState&) const = default;
};

struct ProductOutcome {
  ProductState target;
  double probability;
  double reward;
  double weakest;
};

/// MDP x DFA. The DFA reads the label of the state being left:
/// (s, x) -a-> (s', delta(x, l(s))). Accepting iff x is accepting. Entering
/// an accepting state earns the layout's accept bonus.
class ProductMdp {
 public:
  ProductMdp(std::shared_ptr<const ComposedMdp> mdp, std::shared_ptr<const Dfa> dfa);

  const ComposedMdp& mdp() const noexcept { return *mdp_; }
  const Dfa& dfa() const noexcept { return *dfa_; }
  std::shared_ptr<const ComposedMdp> mdp_ptr() const noexcept { return mdp_; }
  std::shared_ptr<const Dfa> dfa_ptr() const noexcept { return dfa_; }

  /// |S| * |X|
  std::uint64_t size() const noexcept { return std::uint64_t(mdp_->size()) * dfa_->size(); }
  std::uint64_t id(ProductState p) const noexcept { return std::uint64_t(p.s) * dfa_->size() + p.x; }
  ProductState initial() const noexcept { return {mdp_->initial(), dfa_->initial()}; }

  bool accepting(ProductState p) const { return dfa_->accepting(p.x); }
  /// No accepting DFA state is reachable any more.
  bool dead(ProductState p) const { return dead_[p.x]; }
  std::size_t symbol(std::uint32_t s) const { return symbols_[s]; }

  void outcomes(ProductState p, Action a, std::vector<ProductOutcome>& out) const;

 private:
  std::shared_ptr<const ComposedMdp> mdp_;
  std::shared_ptr<const Dfa> dfa_;
  std::vector<std::uint32_t> symbols_;
  std::vector<bool> dead_;
  double accept_bonus_;
};

/// Throws AlphabetMismatch when the DFA width differs from the MDP width or
/// an MDP label is not an event of the DFA alphabet.
std::shared_ptr<const ProductMdp> build_product(std::shared_ptr<const ComposedMdp> mdp,
                                                std::shared_ptr<const Dfa> dfa);

/// Index of the outcome drawn with probability proportional to `probability`.
template <class O, class Rng>
std::size_t sample_outcome(std::span<const O> outs, Rng& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t k = 0; k + 1 < outs.size(); ++k) {
    u -= outs[k].probability;
    if (u < 0.0) return k;
  }
  return outs.size() - 1;
}

}  // namespace secrl

#endif  // SECRL_PRODUCT_HPP
