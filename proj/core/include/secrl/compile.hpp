#ifndef SECRL_COMPILE_HPP
#define SECRL_COMPILE_HPP

#include <optional>
#include <string>
#include <vector>

#include "secrl/alphabet.hpp"
#include "secrl/automaton.hpp"
#include "secrl/formula.hpp"

namespace secrl {

/// DFA for a formula body over `alphabet` (width = variables.size()), built
/// by bounded progression up to `horizon` (default: the body's deadline).
/// Coordinate c of a symbol is the event of variables[c]. Accepting states
/// are absorbing, so a word is accepted iff some prefix reaches acceptance.
/// Throws AlphabetMismatch for propositions outside the alphabet.
Dfa twtl_to_dfa(const InnerFormula& body, const std::vector<std::string>& variables, const TupleAlphabet& alphabet,
                std::optional<TimeUnits> horizon = std::nullopt);

struct EliminationOptions {
  /// Keep one coordinate per quantified variable and leave the quantifier
  /// to the caller. When false, every variable but the first is projected
  /// away (exists: project then determinize; forall: complement, project,
  /// determinize, complement).
  bool keep_width = true;
};

/// Automaton for a closed, alternation-free formula over alphabet events
/// (the alphabet's width is ignored). Throws AlternationError / ClosureError.
Dfa quantifier_eliminate(const FormulaAst& f, const TupleAlphabet& alphabet, EliminationOptions options = {});

}  // namespace secrl

#endif  // SECRL_COMPILE_HPP
