#ifndef SECRL_AUTOMATON_HPP
#define SECRL_AUTOMATON_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secrl/alphabet.hpp"

namespace secrl {

using StateId = std::uint32_t;
using Symbol = std::size_t;

class Nfa {
 public:
  Nfa(TupleAlphabet alphabet, std::size_t states, StateId initial);

  void add_transition(StateId from, Symbol sym, StateId to);
  void set_accepting(StateId s, bool acc = true);

  const TupleAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return accepting_.size(); }
  StateId initial() const noexcept { return initial_; }
  bool accepting(StateId s) const { return accepting_[s]; }

  /// (symbol, target) pairs leaving `s`, sorted and without duplicates
  /// once finalize() has run.
  const std::vector<std::pair<Symbol, StateId>>& out(StateId s) const { return out_[s]; }
  void finalize();

  bool accepts(std::span<const Symbol> word) const;

 private:
  TupleAlphabet alphabet_;
  StateId initial_;
  std::vector<bool> accepting_;
  std::vector<std::vector<std::pair<Symbol, StateId>>> out_;
};

/// Total deterministic automaton; the transition table is dense.
class Dfa {
 public:
  Dfa(TupleAlphabet alphabet, std::size_t states, StateId initial, std::vector<StateId> delta,
      std::vector<bool> accepting);

  const TupleAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return accepting_.size(); }
  StateId initial() const noexcept { return initial_; }
  bool accepting(StateId s) const { return accepting_[s]; }
  StateId next(StateId s, Symbol sym) const { return delta_[s * alphabet_.size() + sym]; }

  StateId run(std::span<const Symbol> word) const;
  bool accepts(std::span<const Symbol> word) const { return accepting(run(word)); }

  /// Zips one event sequence per coordinate (equal lengths) and runs it.
  bool accepts_tuple(const std::vector<std::vector<Event>>& tuple) const;

  /// States from which no accepting state can be reached.
  std::vector<bool> dead_states() const;

  /// Non-accepting state whose every transition loops back to itself.
  bool is_rejecting_sink(StateId s) const;

  std::size_t transition_count() const { return delta_.size(); }

  /// Plain-text adjacency: `initial q`, `accepting q...`, then one
  /// `src  symbol  dst` line per transition.
  std::string to_text() const;

 private:
  TupleAlphabet alphabet_;
  StateId initial_;
  std::vector<StateId> delta_;
  std::vector<bool> accepting_;
};

Dfa determinize(const Nfa& n);
Dfa complement(const Dfa& d);
Dfa restrict_reachable(const Dfa& d);
Nfa to_nfa(const Dfa& d);

/// Drops tuple coordinate `coord`; the result accepts the words that have
/// some extension accepted by `d`. Throws WidthError unless width >= 2 and
/// coord < width.
Nfa project_existential(const Dfa& d, std::size_t coord);

}  // namespace secrl

#endif  // SECRL_AUTOMATON_HPP
