#include "secrl/product.hpp"

#include "secrl/error.hpp"

namespace secrl {

ProductMdp::ProductMdp(std::shared_ptr<const ComposedMdp> mdp, std::shared_ptr<const Dfa> dfa)
    : mdp_(std::move(mdp)), dfa_(std::move(dfa)), accept_bonus_(mdp_->base().layout().reward.accept) {
  const auto& alpha = dfa_->alphabet();
  if (alpha.width() != mdp_->width()) {
    throw AlphabetMismatch("automaton width " + std::to_string(alpha.width()) + " does not match " +
                           std::to_string(mdp_->width()) + " traces");
  }
  if (!(alpha.propositions() == grid_propositions())) {
    throw AlphabetMismatch("automaton propositions differ from the grid propositions");
  }
  symbols_.resize(mdp_->size());
  for (std::uint32_t s = 0; s < mdp_->size(); ++s) {
    try {
      symbols_[s] = static_cast<std::uint32_t>(mdp_->symbol(s, alpha));
    } catch (const LabelMismatch& e) {
      throw AlphabetMismatch(e.what());
    }
  }
  dead_ = dfa_->dead_states();
}

void ProductMdp::outcomes(ProductState p, Action a, std::vector<ProductOutcome>& out) const {
  out.clear();
  thread_local std::vector<Outcome> scratch;
  mdp_->outcomes(p.s, a, scratch);
  const StateId x2 = dfa_->next(p.x, symbols_[p.s]);
  const double bonus = (!dfa_->accepting(p.x) && dfa_->accepting(x2)) ? accept_bonus_ : 0.0;
  for (const auto& o : scratch) out.push_back({{o.target, x2}, o.probability, o.reward + bonus, o.weakest});
}

std::shared_ptr<const ProductMdp> build_product(std::shared_ptr<const ComposedMdp> mdp,
                                                std::shared_ptr<const Dfa> dfa) {
  return std::make_shared<const ProductMdp>(std::move(mdp), std::move(dfa));
}

}  // namespace secrl
