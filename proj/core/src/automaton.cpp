#include "secrl/automaton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "secrl/error.hpp"

namespace secrl {

Nfa::Nfa(TupleAlphabet alphabet, std::size_t states, StateId initial)
    : alphabet_(std::move(alphabet)), initial_(initial), accepting_(states, false), out_(states) {
  if (initial >= states) throw Error("initial state out of range");
}

void Nfa::add_transition(StateId from, Symbol sym, StateId to) {
  if (from >= size() || to >= size()) throw Error("transition state out of range");
  if (sym >= alphabet_.size()) throw Error("transition symbol outside the alphabet");
  out_[from].emplace_back(sym, to);
}

void Nfa::set_accepting(StateId s, bool acc) { accepting_.at(s) = acc; }

void Nfa::finalize() {
  for (auto& v : out_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

bool Nfa::accepts(std::span<const Symbol> word) const {
  std::vector<bool> cur(size(), false), nxt(size());
  cur[initial_] = true;
  for (Symbol a : word) {
    std::fill(nxt.begin(), nxt.end(), false);
    for (StateId s = 0; s < size(); ++s) {
      if (!cur[s]) continue;
      for (auto [sym, t] : out_[s]) {
        if (sym == a) nxt[t] = true;
      }
    }
    cur.swap(nxt);
  }
  for (StateId s = 0; s < size(); ++s) {
    if (cur[s] && accepting_[s]) return true;
  }
  return false;
}

Dfa::Dfa(TupleAlphabet alphabet, std::size_t states, StateId initial, std::vector<StateId> delta,
         std::vector<bool> accepting)
    : alphabet_(std::move(alphabet)), initial_(initial), delta_(std::move(delta)), accepting_(std::move(accepting)) {
  if (accepting_.size() != states) throw Error("accepting flags do not match state count");
  if (delta_.size() != states * alphabet_.size()) throw Error("transition table is not total");
  if (initial_ >= states) throw Error("initial state out of range");
  for (StateId t : delta_) {
    if (t >= states) throw Error("transition target out of range");
  }
}

StateId Dfa::run(std::span<const Symbol> word) const {
  StateId s = initial_;
  for (Symbol a : word) s = next(s, a);
  return s;
}

bool Dfa::accepts_tuple(const std::vector<std::vector<Event>>& tuple) const {
  if (tuple.size() != alphabet_.width()) throw WidthError("tuple width does not match the automaton");
  const std::size_t len = tuple.empty() ? 0 : tuple[0].size();
  std::vector<Event> col(tuple.size());
  StateId s = initial_;
  for (std::size_t p = 0; p < len; ++p) {
    for (std::size_t c = 0; c < tuple.size(); ++c) col[c] = tuple[c].at(p);
    s = next(s, alphabet_.encode(col));
  }
  return accepting(s);
}

std::vector<bool> Dfa::dead_states() const {
  const std::size_t n = size(), k = alphabet_.size();
  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s) {
    for (Symbol a = 0; a < k; ++a) pred[next(s, a)].push_back(s);
  }
  std::vector<bool> live(n, false);
  std::deque<StateId> q;
  for (StateId s = 0; s < n; ++s) {
    if (accepting_[s]) {
      live[s] = true;
      q.push_back(s);
    }
  }
  while (!q.empty()) {
    const StateId s = q.front();
    q.pop_front();
    for (StateId p : pred[s]) {
      if (!live[p]) {
        live[p] = true;
        q.push_back(p);
      }
    }
  }
  std::vector<bool> dead(n);
  for (StateId s = 0; s < n; ++s) dead[s] = !live[s];
  return dead;
}

bool Dfa::is_rejecting_sink(StateId s) const {
  if (accepting_[s]) return false;
  for (Symbol a = 0; a < alphabet_.size(); ++a) {
    if (next(s, a) != s) return false;
  }
  return true;
}

std::string Dfa::to_text() const {
  std::ostringstream os;
  os << "states " << size() << "\n";
  os << "initial " << initial_ << "\n";
  os << "accepting";
  for (StateId s = 0; s < size(); ++s) {
    if (accepting_[s]) os << ' ' << s;
  }
  os << "\n";
  for (StateId s = 0; s < size(); ++s) {
    for (Symbol a = 0; a < alphabet_.size(); ++a) {
      os << s << "  " << alphabet_.format_symbol(a) << "  " << next(s, a) << "\n";
    }
  }
  return os.str();
}

Dfa determinize(const Nfa& n) {
  const std::size_t k = n.alphabet().size();
  std::map<std::vector<StateId>, StateId> ids;
  std::vector<std::vector<StateId>> subsets;
  std::vector<StateId> delta;
  std::vector<bool> acc;

  auto intern = [&](std::vector<StateId> set) -> StateId {
    auto [it, fresh] = ids.emplace(set, static_cast<StateId>(subsets.size()));
    if (fresh) {
      bool a = false;
      for (StateId s : set) a = a || n.accepting(s);
      acc.push_back(a);
      subsets.push_back(std::move(set));
    }
    return it->second;
  };

  intern({n.initial()});
  std::vector<std::vector<StateId>> succ(k);
  for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
    for (auto& v : succ) v.clear();
    for (StateId s : subsets[cur]) {
      for (auto [sym, t] : n.out(s)) succ[sym].push_back(t);
    }
    for (Symbol a = 0; a < k; ++a) {
      auto& v = succ[a];
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      delta.push_back(intern(v));
    }
  }
  return Dfa(n.alphabet(), subsets.size(), 0, std::move(delta), std::move(acc));
}

Dfa complement(const Dfa& d) {
  std::vector<StateId> delta;
  delta.reserve(d.transition_count());
  std::vector<bool> acc(d.size());
  for (StateId s = 0; s < d.size(); ++s) {
    acc[s] = !d.accepting(s);
    for (Symbol a = 0; a < d.alphabet().size(); ++a) delta.push_back(d.next(s, a));
  }
  return Dfa(d.alphabet(), d.size(), d.initial(), std::move(delta), std::move(acc));
}

Dfa restrict_reachable(const Dfa& d) {
  const std::size_t k = d.alphabet().size();
  std::vector<StateId> map(d.size(), ~StateId{0});
  std::vector<StateId> order{d.initial()};
  map[d.initial()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Symbol a = 0; a < k; ++a) {
      const StateId t = d.next(order[i], a);
      if (map[t] == ~StateId{0}) {
        map[t] = static_cast<StateId>(order.size());
        order.push_back(t);
      }
    }
  }
  std::vector<StateId> delta;
  delta.reserve(order.size() * k);
  std::vector<bool> acc;
  for (StateId s : order) {
    acc.push_back(d.accepting(s));
    for (Symbol a = 0; a < k; ++a) delta.push_back(map[d.next(s, a)]);
  }
  return Dfa(d.alphabet(), order.size(), 0, std::move(delta), std::move(acc));
}

Nfa to_nfa(const Dfa& d) {
  Nfa n(d.alphabet(), d.size(), d.initial());
  for (StateId s = 0; s < d.size(); ++s) {
    n.set_accepting(s, d.accepting(s));
    for (Symbol a = 0; a < d.alphabet().size(); ++a) n.add_transition(s, a, d.next(s, a));
  }
  n.finalize();
  return n;
}

Nfa project_existential(const Dfa& d, std::size_t coord) {
  const std::size_t w = d.alphabet().width();
  if (w < 2 || coord >= w) {
    throw WidthError("cannot project coordinate " + std::to_string(coord) + " of a width " + std::to_string(w) +
                     " alphabet");
  }
  const TupleAlphabet out_alpha = d.alphabet().with_width(w - 1);
  const std::size_t e = d.alphabet().events().size();
  std::size_t low = 1;
  for (std::size_t c = 0; c < coord; ++c) low *= e;

  Nfa n(out_alpha, d.size(), d.initial());
  for (StateId s = 0; s < d.size(); ++s) {
    n.set_accepting(s, d.accepting(s));
    for (Symbol a = 0; a < d.alphabet().size(); ++a) {
      // remove digit `coord` from the mixed-radix symbol
      const Symbol projected = (a % low) + (a / (low * e)) * low;
      n.add_transition(s, projected, d.next(s, a));
    }
  }
  n.finalize();
  return n;
}

}  // namespace secrl
